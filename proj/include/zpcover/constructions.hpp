#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zpcover/alon_alweiss.hpp"
#include "zpcover/family.hpp"
#include "zpcover/rng.hpp"
#include "zpcover/zp_core.hpp"

namespace zpcover {

/// The base-p construction: vector i is the base-p digit string of i,
/// repeated in p blocks with block b scaled by b mod p (block p is the zero
/// block, which supplies the 0 difference). Any digit difference D != 0
/// yields differences {D, 2D, ..., (p-1)D, 0} = Z_p, so the family is
/// Z_p-covering. ell = p * ceil(log_p N), with N = 1 using one digit.
inline CoveringFamily base_p_family(const PrimeModulus& p, long long N) {
    if (N < 1) throw std::invalid_argument("base_p_family: N must be >= 1");
    const long long q = p.value();
    int digits = 1;
    {
        long long cap = q;
        while (cap < N) {
            if (cap > (std::numeric_limits<long long>::max)() / q)
                throw BudgetError("base_p_family: N too large");
            cap *= q;
            ++digits;
        }
    }
    const int ell = p.value() * digits;
    if (static_cast<unsigned long long>(N) * static_cast<unsigned long long>(ell) *
            sizeof(Entry) >
        memory_budget())
        throw BudgetError("base_p_family: family exceeds the memory budget");

    std::vector<Entry> data;
    data.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(ell));
    std::vector<int> dig(static_cast<std::size_t>(digits));
    for (long long i = 0; i < N; ++i) {
        long long rest = i;
        for (int j = 0; j < digits; ++j) {
            dig[static_cast<std::size_t>(j)] = static_cast<int>(rest % q);
            rest /= q;
        }
        for (int b = 1; b <= p.value(); ++b) {
            for (int j = 0; j < digits; ++j)
                data.push_back(static_cast<Entry>(
                    static_cast<long long>(dig[static_cast<std::size_t>(j)]) * b % q));
        }
    }
    return CoveringFamily::create(p, ell, std::move(data), CoverSet::all(p.value()));
}

/// Size-for-length boost: all z-fold concatenations. Size |F|^z, length
/// z*ell; preserves any S the input covers.
inline CoveringFamily concat_boost(const CoveringFamily& fam, int z) {
    if (z < 1) throw std::invalid_argument("concat_boost: z must be >= 1");
    if (z == 1) return fam;
    CoveringFamily out = fam;
    for (int i = 1; i < z; ++i) out = concat_families(out, fam);
    return out;
}

/// Cover-for-length boost: v -> (v, s*v). An S-covering family becomes
/// (S u sS)-covering at twice the length.
inline CoveringFamily scale_boost(const CoveringFamily& fam, int s) {
    const int p = fam.modulus();
    const int s_mod = ((s % p) + p) % p;
    if (s_mod == 0) throw std::domain_error("scale_boost: s must be nonzero");
    std::vector<Entry> data;
    data.reserve(fam.size() * static_cast<std::size_t>(2 * fam.length()));
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const auto r = fam.row(i);
        data.insert(data.end(), r.begin(), r.end());
        for (Entry e : r)
            data.push_back(static_cast<Entry>(static_cast<long long>(e) * s_mod % p));
    }
    std::optional<CoverSet> claim = fam.claimed_cover();
    if (claim) claim = claim->united(claim->scaled(s_mod));
    return CoveringFamily::create(PrimeModulus(p), 2 * fam.length(), std::move(data),
                                  std::move(claim));
}

/// The bit-lift: turn a Z_k-covering family over modulus k into a
/// [0, k-1]-covering family over modulus p (entries land in [0, 2k-1], so
/// 2k <= p is required). Copy j of the first ceil(log2 k) copies adds k to
/// every entry whose j-th bit is 0; the remaining copies are unchanged. For
/// an ordered pair with u_i - u'_i = k' (mod k), either the plain copy
/// (u_i >= u'_i) or the copy singling out a bit where u_i has 0 and u'_i
/// has 1 realizes k' mod p.
inline CoveringFamily bit_lift(const CoveringFamily& f1, const PrimeModulus& p,
                               bool minimal = false) {
    const int k = f1.modulus();
    if (k < 2) throw std::invalid_argument("bit_lift: source modulus must be >= 2");
    if (2 * k > p.value())
        throw std::invalid_argument("bit_lift: need 2k <= p so lifted entries stay below p (k=" +
                                    std::to_string(k) + ", p=" + std::to_string(p.value()) + ")");
    {
        const CoverageReport rep = is_covering(f1, CoverSet::all(k));
        if (!rep.is_covering)
            throw VerificationError("bit_lift: source family is not Z_k-covering", rep);
    }
    const int bits = ceil_log2(k);  // k = 2 -> 1
    const int plain_copies = minimal ? 1 : bits;
    const int ell2 = f1.length() * (bits + plain_copies);
    if (fam_bytes(f1.size(), ell2) > memory_budget())
        throw BudgetError("bit_lift: output exceeds the memory budget");

    std::vector<Entry> data;
    data.reserve(f1.size() * static_cast<std::size_t>(ell2));
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const auto r = f1.row(i);
        for (int j = 0; j < bits; ++j) {
            for (Entry e : r)
                data.push_back(((e >> j) & 1) ? e : static_cast<Entry>(e + k));
        }
        for (int c = 0; c < plain_copies; ++c) data.insert(data.end(), r.begin(), r.end());
    }
    return CoveringFamily::create(p, ell2, std::move(data),
                                  CoverSet::range(p.value(), 0, k - 1));
}

/// A scaling set S: [0, k-1] * S covers all of Z_p, so concatenating scaled
/// copies of a [0, k-1]-covering family makes it Z_p-covering.
struct ScalingSet {
    int p = 0;
    int k = 0;
    std::vector<int> elements;
    bool greedy_fallback = false;
    long long sampled_bound = 0;  // ceil(p ln p / (k-1))
};

/// Brute-force check of the scaling-set property over all k * |S| products.
inline bool scaling_set_covers(int p, int k, const std::vector<int>& elements) {
    std::vector<char> hit(static_cast<std::size_t>(p), 0);
    int left = p;
    for (int j : elements) {
        for (int i = 0; i < k; ++i) {
            const int g = static_cast<int>(static_cast<long long>(i) * j % p);
            if (!hit[static_cast<std::size_t>(g)]) {
                hit[static_cast<std::size_t>(g)] = 1;
                --left;
            }
        }
    }
    return left == 0;
}

/// Randomized construction of a scaling set: sample ceil(p ln p / (k-1))
/// elements with replacement, dedupe, and verify; after `attempts` failures
/// fall back to a greedy set cover, which always lands (element j covers j
/// itself via i = 1, and 0 is covered by i = 0).
inline ScalingSet find_scaling_set(const PrimeModulus& p, int k, std::uint64_t seed,
                                   int attempts = 64) {
    if (k < 2 || k > p.value())
        throw std::invalid_argument("find_scaling_set: need 2 <= k <= p");
    const int q = p.value();
    const double pd = static_cast<double>(q);
    const long long target =
        static_cast<long long>(std::ceil(pd * std::log(pd) / (k - 1)));

    ScalingSet out;
    out.p = q;
    out.k = k;
    out.sampled_bound = target;

    Rng rng(seed);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        std::vector<char> seen(static_cast<std::size_t>(q), 0);
        std::vector<int> sample;
        for (long long i = 0; i < target; ++i) {
            const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(q)));
            if (!seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = 1;
                sample.push_back(j);
            }
        }
        std::sort(sample.begin(), sample.end());
        if (scaling_set_covers(q, k, sample)) {
            out.elements = std::move(sample);
            return out;
        }
    }

    // Greedy fallback: repeatedly add the element whose multiple set covers
    // the most uncovered residues, smallest element on ties.
    out.greedy_fallback = true;
    std::vector<char> covered(static_cast<std::size_t>(q), 0);
    int left = q;
    while (left > 0) {
        int best = -1, best_gain = -1;
        for (int j = 0; j < q; ++j) {
            int gain = 0;
            for (int i = 0; i < k; ++i) {
                const int g = static_cast<int>(static_cast<long long>(i) * j % q);
                if (!covered[static_cast<std::size_t>(g)]) ++gain;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = j;
            }
        }
        for (int i = 0; i < k; ++i) {
            const int g = static_cast<int>(static_cast<long long>(i) * best % q);
            if (!covered[static_cast<std::size_t>(g)]) {
                covered[static_cast<std::size_t>(g)] = 1;
                --left;
            }
        }
        out.elements.push_back(best);
    }
    return out;
}

/// Scale-and-concatenate: w = (s_1 v, ..., s_|S| v). For g in Z_p pick
/// (i, j) with i * s_j = g; the coordinate realizing difference i inside
/// copy j realizes g, so the result is Z_p-covering.
inline CoveringFamily scale_cover_boost(const CoveringFamily& fam, const ScalingSet& S) {
    if (fam.modulus() != S.p)
        throw std::invalid_argument("scale_cover_boost: modulus mismatch");
    {
        const CoverageReport rep = is_covering(fam, CoverSet::range(S.p, 0, S.k - 1));
        if (!rep.is_covering)
            throw VerificationError("scale_cover_boost: family is not [0, k-1]-covering", rep);
    }
    const int p = fam.modulus();
    const int ell3 = fam.length() * static_cast<int>(S.elements.size());
    if (fam_bytes(fam.size(), ell3) > memory_budget())
        throw BudgetError("scale_cover_boost: output exceeds the memory budget");
    std::vector<Entry> data;
    data.reserve(fam.size() * static_cast<std::size_t>(ell3));
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const auto r = fam.row(i);
        for (int s : S.elements) {
            for (Entry e : r)
                data.push_back(static_cast<Entry>(static_cast<long long>(e) * s % p));
        }
    }
    return CoveringFamily::create(PrimeModulus(p), ell3, std::move(data),
                                  CoverSet::all(p));
}

enum class PipelineBase { base_p, alon_alweiss };

struct StageReport {
    std::string stage;
    long long size = 0;
    long long ell = 0;
    std::string cover;  // the set verified at this stage
    CoverageReport report;
};

struct PipelineStats {
    int p = 0;
    long long N = 0;
    int k = 0;
    long long ell1 = 0;
    long long ell2 = 0;
    long long ell3 = 0;
    double ell_star = 0.0;
    std::string base;
    std::uint64_t seed = 0;
    bool desk_scale_base = false;  // F_1 did not come from the full-scale construction
    std::vector<StageReport> stage_reports;
};

struct PipelineResult {
    CoveringFamily family;
    PipelineStats stats;
};

/// Largest prime k with 2k <= p that also satisfies the parameter
/// constraint for this N; k = 2 always qualifies.
inline int pipeline_default_k(const PrimeModulus& p, long long N) {
    const double log2N = std::max(4.0, std::log2(static_cast<double>(std::max(N, 2ll))));
    int k = 2;
    for (int cand = 3; 2 * cand <= p.value(); cand += 2) {
        if (!is_prime(static_cast<std::uint64_t>(cand))) continue;
        if (parameter_k_feasible(cand, log2N)) k = cand;
    }
    return k;
}

/// The three-stage pipeline: F_1 (Z_k-covering over k) -> F_2 = bit_lift
/// (-> [0, k-1]-covering over p) -> F_3 = scale_cover_boost (-> Z_p-covering).
/// Every stage is verified before the next one runs; a failure aborts with
/// that stage's report. At desk scale the default F_1 is the base-p family
/// over Z_k; base = alon_alweiss runs the balanced-word iteration over Z_k
/// instead (only sensible for tiny odd k) and concat-boosts it up to size N.
inline PipelineResult build_upperbound_family(const PrimeModulus& p, long long N,
                                              PipelineBase base, std::uint64_t seed,
                                              int k_override = 0, int threads = 1) {
    if (N < 1) throw std::invalid_argument("build_upperbound_family: N must be >= 1");
    if (p.value() < 5)
        throw std::invalid_argument(
            "build_upperbound_family: p must be >= 5 (bit_lift needs a prime k with 2k <= p)");

    int k = k_override > 0 ? k_override : pipeline_default_k(p, N);
    if (!is_prime(static_cast<std::uint64_t>(k)) || k < 2 || 2 * k > p.value())
        throw std::invalid_argument("build_upperbound_family: k=" + std::to_string(k) +
                                    " must be a prime with 2k <= p");

    PipelineStats stats;
    stats.p = p.value();
    stats.N = N;
    stats.k = k;
    stats.base = base == PipelineBase::base_p ? "base_p" : "alon_alweiss";
    stats.seed = seed;
    stats.desk_scale_base = true;
    const double log2N = std::log2(static_cast<double>(std::max(N, 2ll)));
    stats.ell_star = static_cast<double>(p.value()) * std::log2(static_cast<double>(p.value())) *
                     log2N / std::sqrt(static_cast<double>(k));

    const PrimeModulus km(k);
    CoveringFamily f1 = [&] {
        if (base == PipelineBase::base_p) return base_p_family(km, N);
        // Balanced-word base over Z_k, padded to Z_k-covering, then
        // concat-boosted to reach size N.
        if (!km.odd())
            throw std::invalid_argument(
                "build_upperbound_family: base=alon_alweiss needs odd k >= 3");
        IterationResult it = aa_iterate(km, k - 1, 2, ceil_log2(k - 1));
        CoveringFamily f = append_zeros(it.family, 1);
        int z = 1;
        unsigned long long reach = f.size();
        while (reach < static_cast<unsigned long long>(N)) {
            reach = detail::checked_mul(reach, f.size(), "build_upperbound_family");
            ++z;
        }
        return concat_boost(f, z);
    }();

    auto verify_stage = [&](const CoveringFamily& fam, const CoverSet& S,
                            const std::string& stage, const std::string& cover) {
        const CoverageReport rep = is_covering(fam, S, threads);
        stats.stage_reports.push_back({stage, static_cast<long long>(fam.size()),
                                       fam.length(), cover, rep});
        if (!rep.is_covering)
            throw VerificationError("build_upperbound_family: stage " + stage +
                                        " failed verification",
                                    rep);
    };

    verify_stage(f1, CoverSet::all(k), "f1_" + stats.base, "Zk");
    stats.ell1 = f1.length();

    CoveringFamily f2 = bit_lift(f1, p);
    verify_stage(f2, CoverSet::range(p.value(), 0, k - 1), "f2_bit_lift", "[0,k-1]");
    stats.ell2 = f2.length();

    const ScalingSet S = find_scaling_set(p, k, seed);
    CoveringFamily f3 = scale_cover_boost(f2, S);
    verify_stage(f3, CoverSet::all(p.value()), "f3_scale_cover", "Zp");
    stats.ell3 = f3.length();
    // ell3 = |S| * ell2 holds by construction
    if (stats.ell3 != static_cast<long long>(S.elements.size()) * stats.ell2)
        throw std::logic_error("build_upperbound_family: ell3 != |S| * ell2");

    return {std::move(f3), std::move(stats)};
}

}  // namespace zpcover
