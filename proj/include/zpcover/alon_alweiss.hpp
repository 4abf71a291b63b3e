#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zpcover/family.hpp"
#include "zpcover/rng.hpp"
#include "zpcover/zp_core.hpp"

namespace zpcover {

/// All balanced words of length ell over Z_p: every nonzero element appears
/// exactly ell/(p-1) times and 0 never does. Closed under scalar
/// multiplication, which is what the step boost leans on.
struct BalancedFamily {
    CoveringFamily family;  // all balanced words in lexicographic order
    int per_symbol = 0;     // ell / (p-1)
};

namespace detail {

/// ell! / (m!)^(p-1) via a product of binomials, with overflow guard.
inline unsigned long long balanced_count(int p, int ell) {
    const int m = ell / (p - 1);
    unsigned long long total = 1;
    int remaining = ell;
    for (int sym = 1; sym < p; ++sym) {
        // C(remaining, m)
        unsigned long long c = 1;
        for (int i = 1; i <= m; ++i) {
            c = checked_mul(c, static_cast<unsigned long long>(remaining - m + i),
                            "balanced_count");
            c /= static_cast<unsigned long long>(i);
        }
        total = checked_mul(total, c, "balanced_count");
        remaining -= m;
    }
    return total;
}

}  // namespace detail

/// Enumerate B_ell in lexicographic order.
inline BalancedFamily enumerate_balanced(const PrimeModulus& p, int ell) {
    require_odd_prime(p, "enumerate_balanced");
    if (ell < 1 || ell % (p.value() - 1) != 0)
        throw std::invalid_argument("enumerate_balanced: ell=" + std::to_string(ell) +
                                    " is not a positive multiple of p-1");
    const int m = ell / (p.value() - 1);
    const unsigned long long count = detail::balanced_count(p.value(), ell);
    if (detail::checked_mul(count, static_cast<unsigned long long>(ell), "enumerate_balanced") *
            sizeof(Entry) >
        memory_budget())
        throw BudgetError("enumerate_balanced: family exceeds the memory budget");

    std::vector<Entry> word;
    word.reserve(static_cast<std::size_t>(ell));
    for (int sym = 1; sym < p.value(); ++sym)
        word.insert(word.end(), static_cast<std::size_t>(m), static_cast<Entry>(sym));

    std::vector<Entry> data;
    data.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(ell));
    do {
        data.insert(data.end(), word.begin(), word.end());
    } while (std::next_permutation(word.begin(), word.end()));

    BalancedFamily out{CoveringFamily::create(p, ell, std::move(data)), m};
    return out;
}

/// The base family A_0: balanced words whose block t (of length 2*ell0/(p-1))
/// contains only the elements 2t+1 and 2t+2, each the same number of times.
/// {1}-covering: two distinct members disagree inside some block, and equal
/// counts force both orientations of the difference 1 to appear.
inline CoveringFamily base_family_A0(const PrimeModulus& p, int ell0) {
    require_odd_prime(p, "base_family_A0");
    if (ell0 < 1 || ell0 % (p.value() - 1) != 0)
        throw std::invalid_argument("base_family_A0: ell0=" + std::to_string(ell0) +
                                    " is not a positive multiple of p-1");
    const int m = ell0 / (p.value() - 1);
    const int blocks = (p.value() - 1) / 2;

    // arrangements of one block, lexicographic
    std::vector<std::vector<Entry>> block_arrangements;
    {
        std::vector<Entry> blk(static_cast<std::size_t>(2 * m));
        std::fill(blk.begin(), blk.begin() + m, Entry{0});
        std::fill(blk.begin() + m, blk.end(), Entry{1});
        do {
            block_arrangements.push_back(blk);
        } while (std::next_permutation(blk.begin(), blk.end()));
    }

    unsigned long long count = 1;
    for (int b = 0; b < blocks; ++b)
        count = detail::checked_mul(count, block_arrangements.size(), "base_family_A0");
    if (detail::checked_mul(count, static_cast<unsigned long long>(ell0), "base_family_A0") *
            sizeof(Entry) >
        memory_budget())
        throw BudgetError("base_family_A0: family exceeds the memory budget");

    std::vector<Entry> data;
    data.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(ell0));
    std::vector<std::size_t> choice(static_cast<std::size_t>(blocks), 0);
    for (;;) {
        for (int b = 0; b < blocks; ++b) {
            for (Entry bit : block_arrangements[choice[static_cast<std::size_t>(b)]])
                data.push_back(static_cast<Entry>(2 * b + 1 + bit));
        }
        int pos = blocks - 1;
        while (pos >= 0 && ++choice[static_cast<std::size_t>(pos)] == block_arrangements.size()) {
            choice[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return CoveringFamily::create(p, ell0, std::move(data), CoverSet::of(p.value(), {1}));
}

enum class PartitionMode { exhaustive, sampled };

/// A star decomposition of B_ell: each part is a set of balanced words that
/// one center permutation maps into the source family A, hence each part
/// inherits A's covering set.
struct StarPartition {
    CoveringFamily base;                          // the balanced family B_ell
    CoverSet S;                                   // what every part covers
    std::vector<std::vector<std::uint32_t>> parts;  // row indices into base
    std::vector<std::vector<int>> centers;          // one permutation of [ell] per part
    std::vector<std::uint32_t> part_of;             // part index per base row
    std::size_t min_part_size = 0;
    double paper_part_bound = 0.0;  // |A| / (10 ell log2 p), reported, not enforced
};

namespace detail {

/// Binary search for a row in a lex-sorted family. Returns npos when absent.
inline std::size_t find_row(const CoveringFamily& fam, std::span<const Entry> target) {
    std::size_t lo = 0, hi = fam.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const auto r = fam.row(mid);
        if (std::lexicographical_compare(r.begin(), r.end(), target.begin(), target.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < fam.size()) {
        const auto r = fam.row(lo);
        if (std::equal(r.begin(), r.end(), target.begin(), target.end())) return lo;
    }
    return static_cast<std::size_t>(-1);
}

}  // namespace detail

/// Partition B into stars against the covering family A (Lemma hall shape:
/// a greedy pass over a permutation stream; every unassigned word joins the
/// first permutation that maps it into A). The paper's part-size guarantee
/// is reported for comparison only; the covering property of every part is
/// what downstream steps consume and it is verified here directly.
inline StarPartition star_partition(const BalancedFamily& B, const CoveringFamily& A,
                                    const CoverSet& S, PartitionMode mode,
                                    std::uint64_t seed = 0,
                                    std::uint64_t sampled_draw_limit = 1u << 20) {
    const CoveringFamily& base = B.family;
    const int p = base.modulus();
    const int ell = base.length();
    if (A.modulus() != p) throw std::invalid_argument("star_partition: modulus mismatch");
    if (A.length() != ell) throw std::invalid_argument("star_partition: length mismatch");
    if (S.modulus() != p) throw std::invalid_argument("star_partition: cover set modulus mismatch");

    // A must sit inside B and be S-covering.
    std::vector<char> in_A(base.size(), 0);
    for (std::size_t i = 0; i < A.size(); ++i) {
        const std::size_t at = detail::find_row(base, A.row(i));
        if (at == static_cast<std::size_t>(-1))
            throw std::invalid_argument("star_partition: A contains a non-balanced word (row " +
                                        std::to_string(i) + ")");
        in_A[at] = 1;
    }
    {
        const CoverageReport rep = is_covering(A, S);
        if (!rep.is_covering)
            throw VerificationError("star_partition: A is not S-covering", rep);
    }

    if (mode == PartitionMode::exhaustive && ell > 8)
        throw std::invalid_argument("star_partition: exhaustive mode refused for ell > 8");

    StarPartition out{base, S, {}, {}, std::vector<std::uint32_t>(base.size(), 0), 0, 0.0};
    std::vector<char> assigned(base.size(), 0);
    std::size_t left = base.size();

    std::vector<int> perm(static_cast<std::size_t>(ell));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Entry> permuted(static_cast<std::size_t>(ell));
    Rng rng(seed);
    std::uint64_t draws = 0;

    auto try_perm = [&](const std::vector<int>& pi) {
        std::vector<std::uint32_t> star;
        for (std::size_t b = 0; b < base.size(); ++b) {
            if (assigned[b]) continue;
            const auto row = base.row(b);
            for (int i = 0; i < ell; ++i)
                permuted[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)])];
            const std::size_t at = detail::find_row(base, permuted);
            if (at != static_cast<std::size_t>(-1) && in_A[at])
                star.push_back(static_cast<std::uint32_t>(b));
        }
        if (!star.empty()) {
            const auto part_id = static_cast<std::uint32_t>(out.parts.size());
            for (std::uint32_t b : star) {
                assigned[b] = 1;
                out.part_of[b] = part_id;
            }
            left -= star.size();
            out.parts.push_back(std::move(star));
            out.centers.push_back(pi);
        }
    };

    if (mode == PartitionMode::exhaustive) {
        std::sort(perm.begin(), perm.end());
        do {
            try_perm(perm);
            if (left == 0) break;
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (left != 0)
            throw std::logic_error("star_partition: exhaustive pass left words unassigned");
    } else {
        while (left > 0) {
            if (++draws > sampled_draw_limit)
                throw std::runtime_error("star_partition: sampled draw limit exceeded");
            rng.shuffle(perm);
            try_perm(perm);
        }
    }

    // Each part must itself be S-covering; verified, not assumed.
    out.min_part_size = base.size();
    for (const auto& part : out.parts) {
        out.min_part_size = std::min(out.min_part_size, part.size());
        std::vector<Entry> data;
        data.reserve(part.size() * static_cast<std::size_t>(ell));
        for (std::uint32_t b : part) {
            const auto r = base.row(b);
            data.insert(data.end(), r.begin(), r.end());
        }
        const CoveringFamily pf = CoveringFamily::create(PrimeModulus(p), ell, std::move(data));
        const CoverageReport rep = is_covering(pf, S);
        if (!rep.is_covering)
            throw VerificationError("star_partition: a part failed its covering check", rep);
    }
    out.paper_part_bound = static_cast<double>(A.size()) /
                           (10.0 * ell * std::log2(static_cast<double>(p)));
    return out;
}

/// The walk construction: enumerate W_m (walks w_1..w_m through the balanced
/// family where each w_i lies in the part of a^{-1} w_{i-1}), keep the
/// prefixes of walks ending at the most popular final word. The result is
/// (aS u S)-covering, verified before returning.
inline CoveringFamily step_boost(const StarPartition& P, int m, int a) {
    const CoveringFamily& base = P.base;
    const int p = base.modulus();
    const int ell = base.length();
    if (m < 2) throw std::invalid_argument("step_boost: m must be >= 2");
    if (P.parts.empty()) throw std::invalid_argument("step_boost: empty partition");
    const int a_mod = ((a % p) + p) % p;
    if (a_mod == 0) throw std::domain_error("step_boost: a must be nonzero");
    const int ainv = mod_inverse(a_mod, PrimeModulus(p));

    const std::size_t nb = base.size();
    // pmap[v] = part of a^{-1} v; the balanced family is closed under scalar
    // multiplication so the lookup always lands.
    std::vector<std::uint32_t> pmap(nb);
    {
        std::vector<Entry> scaled(static_cast<std::size_t>(ell));
        for (std::size_t v = 0; v < nb; ++v) {
            const auto row = base.row(v);
            for (int i = 0; i < ell; ++i)
                scaled[static_cast<std::size_t>(i)] =
                    static_cast<Entry>(static_cast<long long>(ainv) * row[static_cast<std::size_t>(i)] % p);
            const std::size_t at = detail::find_row(base, scaled);
            if (at == static_cast<std::size_t>(-1))
                throw std::logic_error("step_boost: balanced family is not scalar-closed");
            pmap[v] = P.part_of[at];
        }
    }

    constexpr unsigned long long kCountCap = 1ull << 62;
    const std::size_t w0 = 0;  // lexicographically first balanced word
    std::vector<unsigned long long> counts(nb, 0);
    for (std::size_t v = 0; v < nb; ++v) counts[v] = (P.part_of[v] == pmap[w0]) ? 1 : 0;
    for (int step = 2; step <= m; ++step) {
        std::vector<unsigned long long> per_part(P.parts.size(), 0);
        for (std::size_t u = 0; u < nb; ++u) {
            if (counts[u] == 0) continue;
            unsigned long long& slot = per_part[pmap[u]];
            if (slot > kCountCap - counts[u]) throw BudgetError("step_boost: walk count overflow");
            slot += counts[u];
        }
        for (std::size_t v = 0; v < nb; ++v) counts[v] = per_part[P.part_of[v]];
    }

    std::size_t vstar = 0;
    for (std::size_t v = 1; v < nb; ++v)
        if (counts[v] > counts[vstar]) vstar = v;  // ties: smallest index = lex smallest
    if (counts[vstar] == 0) throw std::logic_error("step_boost: no walks reached any endpoint");

    const int out_ell = (m - 1) * ell;
    if (detail::checked_mul(counts[vstar], static_cast<unsigned long long>(out_ell),
                            "step_boost") *
            sizeof(Entry) >
        memory_budget())
        throw BudgetError("step_boost: output exceeds the memory budget");

    // Enumerate prefixes (w_1 .. w_{m-1}) of walks ending at vstar, in
    // lexicographic index order.
    std::vector<Entry> data;
    data.reserve(static_cast<std::size_t>(counts[vstar]) * static_cast<std::size_t>(out_ell));
    std::vector<std::size_t> walk(static_cast<std::size_t>(m - 1));
    auto emit = [&]() {
        for (std::size_t idx : walk) {
            const auto r = base.row(idx);
            data.insert(data.end(), r.begin(), r.end());
        }
    };
    auto rec = [&](auto&& self, int depth, std::uint32_t needed_part) -> void {
        if (depth == m - 1) {
            if (P.part_of[vstar] == pmap[walk[static_cast<std::size_t>(depth - 1)]]) emit();
            return;
        }
        for (std::size_t v = 0; v < nb; ++v) {
            if (P.part_of[v] != needed_part) continue;
            walk[static_cast<std::size_t>(depth)] = v;
            self(self, depth + 1, pmap[v]);
        }
    };
    // depth counts chosen coordinates; constraint for w_1 comes from w_0
    auto rec_start = [&]() {
        for (std::size_t v = 0; v < nb; ++v) {
            if (P.part_of[v] != pmap[w0]) continue;
            walk[0] = v;
            if (m == 2) {
                if (P.part_of[vstar] == pmap[v]) emit();
            } else {
                rec(rec, 1, pmap[v]);
            }
        }
    };
    rec_start();

    const CoverSet target = P.S.united(P.S.scaled(a_mod));
    CoveringFamily out =
        CoveringFamily::create(PrimeModulus(p), out_ell, std::move(data), target);
    const CoverageReport rep = is_covering(out, target);
    if (!rep.is_covering)
        throw VerificationError("step_boost: output failed its (aS u S) covering check", rep);
    return out;
}

struct IterationStep {
    int z = 0;
    int a = 0;
    std::size_t parts = 0;           // K
    std::size_t min_part_size = 0;
    double paper_part_bound = 0.0;
    std::size_t size = 0;
    int length = 0;
    bool verified = false;
};

struct IterationTrace {
    int p = 0;
    int alpha = 0;
    int ell0 = 0;
    int m = 0;
    std::vector<IterationStep> steps;
};

struct IterationResult {
    CoveringFamily family;
    IterationTrace trace;
};

/// The full desk-scale iteration: start from A_0 ({alpha^0}-covering), and
/// for z = 1..z_max star-partition the balanced family against the current
/// A, then step-boost with a = alpha^(2^(z-1)). After step z the family is
/// S_z-covering with S_z = {alpha^i : i < 2^z}; once 2^z >= p-1 that is all
/// of Z_p \ {0} and one appended zero coordinate reaches Z_p.
inline IterationResult aa_iterate(const PrimeModulus& p, int ell0, int m, int z_max,
                                  PartitionMode mode = PartitionMode::exhaustive,
                                  std::uint64_t seed = 0) {
    require_odd_prime(p, "aa_iterate");
    if (m < 2) throw std::invalid_argument("aa_iterate: m must be >= 2");
    if (z_max < 0 || z_max > ceil_log2(p.value() - 1))
        throw std::invalid_argument("aa_iterate: z_max out of range [0, ceil(log2(p-1))]");

    const int alpha = primitive_root(p);
    CoveringFamily A = base_family_A0(p, ell0);
    CoverSet S = CoverSet::of(p.value(), {1});

    IterationTrace trace;
    trace.p = p.value();
    trace.alpha = alpha;
    trace.ell0 = ell0;
    trace.m = m;

    Rng rng(seed);
    for (int z = 1; z <= z_max; ++z) {
        const BalancedFamily B = enumerate_balanced(p, A.length());
        const StarPartition part = star_partition(B, A, S, mode, rng.next());
        const int a = static_cast<int>(
            pow_mod(static_cast<std::uint64_t>(alpha), 1ull << (z - 1),
                    static_cast<std::uint64_t>(p.value())));
        CoveringFamily boosted = step_boost(part, m, a);

        S = S.united(S.scaled(a));
        {
            // S must now be exactly {alpha^i : 0 <= i < 2^z}
            CoverSet expect(p.value());
            for (std::uint64_t i = 0; i < (1ull << z); ++i)
                expect.add(static_cast<int>(pow_mod(static_cast<std::uint64_t>(alpha), i,
                                                    static_cast<std::uint64_t>(p.value()))));
            if (S != expect) throw std::logic_error("aa_iterate: S_z drifted from alpha powers");
        }
        const CoverageReport rep = is_covering(boosted, S);
        trace.steps.push_back({z, a, part.parts.size(), part.min_part_size,
                               part.paper_part_bound, boosted.size(), boosted.length(),
                               rep.is_covering});
        if (!rep.is_covering)
            throw VerificationError("aa_iterate: step " + std::to_string(z) +
                                        " failed its S_z covering check",
                                    rep);
        A = boosted.with_claim(S);
    }
    return {A.with_claim(S), std::move(trace)};
}

}  // namespace zpcover
