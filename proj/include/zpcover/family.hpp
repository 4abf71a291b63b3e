#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "zpcover/cover_set.hpp"
#include "zpcover/zp_core.hpp"

namespace zpcover {

/// Process-wide cap on materialized family bytes. Constructions that would
/// exceed it throw BudgetError instead of thrashing.
inline std::size_t& memory_budget() {
    static std::size_t budget = std::size_t{1} << 30;  // 1 GiB
    return budget;
}

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Entry = std::uint16_t;

inline constexpr int kMaxFamilyModulus = 32749;  // largest prime below 2^15

namespace detail {
inline unsigned long long checked_mul(unsigned long long a, unsigned long long b,
                                      const char* what) {
    if (b != 0 && a > ~0ull / b) throw BudgetError(std::string(what) + ": size overflow");
    return a * b;
}
}  // namespace detail

/// Bytes a family of `rows` vectors of length `ell` would occupy.
inline unsigned long long fam_bytes(unsigned long long rows, long long ell) {
    return detail::checked_mul(detail::checked_mul(rows, static_cast<unsigned long long>(ell),
                                                   "fam_bytes"),
                               sizeof(Entry), "fam_bytes");
}

/// A set of N distinct length-ell vectors over Z_p, stored row-major.
/// claimed_cover is the S the producing construction promises; verification
/// is always explicit and never assumed from the claim.
class CoveringFamily {
public:
    static CoveringFamily create(PrimeModulus p, int ell,
                                 std::vector<Entry> rows_flat,
                                 std::optional<CoverSet> claimed = std::nullopt) {
        if (ell < 1) throw std::invalid_argument("CoveringFamily: ell must be >= 1");
        if (p.value() > kMaxFamilyModulus)
            throw std::invalid_argument("CoveringFamily: modulus too large for entry storage");
        if (rows_flat.empty() || rows_flat.size() % static_cast<std::size_t>(ell) != 0)
            throw std::invalid_argument("CoveringFamily: row data is not a multiple of ell");
        if (rows_flat.size() * sizeof(Entry) > memory_budget())
            throw BudgetError("CoveringFamily: " + std::to_string(rows_flat.size() * sizeof(Entry)) +
                              " bytes exceed the memory budget");
        for (Entry e : rows_flat) {
            if (e >= p.value())
                throw std::invalid_argument("CoveringFamily: entry " + std::to_string(e) +
                                            " out of range [0, " + std::to_string(p.value() - 1) + "]");
        }
        if (claimed && claimed->modulus() != p.value())
            throw std::invalid_argument("CoveringFamily: claimed cover modulus mismatch");

        CoveringFamily f;
        f.p_ = p.value();
        f.ell_ = ell;
        f.data_ = std::move(rows_flat);
        f.claimed_cover_ = std::move(claimed);
        f.require_distinct_rows();
        return f;
    }

    int modulus() const { return p_; }
    int length() const { return ell_; }
    std::size_t size() const { return data_.size() / static_cast<std::size_t>(ell_); }

    std::span<const Entry> row(std::size_t i) const {
        return {data_.data() + i * static_cast<std::size_t>(ell_),
                static_cast<std::size_t>(ell_)};
    }

    const std::vector<Entry>& data() const { return data_; }
    const std::optional<CoverSet>& claimed_cover() const { return claimed_cover_; }

    CoveringFamily with_claim(std::optional<CoverSet> claimed) const {
        CoveringFamily f = *this;
        if (claimed && claimed->modulus() != p_)
            throw std::invalid_argument("CoveringFamily: claimed cover modulus mismatch");
        f.claimed_cover_ = std::move(claimed);
        return f;
    }

    bool operator==(const CoveringFamily& o) const {
        return p_ == o.p_ && ell_ == o.ell_ && data_ == o.data_;
    }

private:
    void require_distinct_rows() const {
        std::vector<std::size_t> order(size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        auto cmp = [this](std::size_t a, std::size_t b) {
            const auto ra = row(a), rb = row(b);
            return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
        };
        std::sort(order.begin(), order.end(), cmp);
        for (std::size_t i = 1; i < order.size(); ++i) {
            const auto ra = row(order[i - 1]), rb = row(order[i]);
            if (std::equal(ra.begin(), ra.end(), rb.begin())) {
                throw std::invalid_argument("CoveringFamily: duplicate vector at rows " +
                                            std::to_string(order[i - 1]) + " and " +
                                            std::to_string(order[i]));
            }
        }
    }

    int p_ = 0;
    int ell_ = 0;
    std::vector<Entry> data_;
    std::optional<CoverSet> claimed_cover_;
};

/// Exact set of coordinatewise differences of the ordered pair (v, w).
inline CoverSet pair_cover_set(std::span<const Entry> v, std::span<const Entry> w, int p) {
    if (v.size() != w.size())
        throw std::invalid_argument("pair_cover_set: length mismatch");
    CoverSet s(p);
    for (std::size_t i = 0; i < v.size(); ++i) {
        int d = static_cast<int>(v[i]) - static_cast<int>(w[i]);
        if (d < 0) d += p;
        s.add(d);
    }
    return s;
}

struct PairFailure {
    std::size_t v_index = 0;
    std::size_t w_index = 0;
    int missing = 0;  // smallest element of S the pair does not realize
};

struct CoverageReport {
    bool is_covering = false;
    std::uint64_t checked_pairs = 0;
    std::optional<PairFailure> first_failure;
    double elapsed_seconds = 0.0;
};

struct VerificationError : std::runtime_error {
    VerificationError(const std::string& msg, CoverageReport r)
        : std::runtime_error(msg), report(std::move(r)) {}
    CoverageReport report;
};

namespace detail {

// Scan ordered pairs (a, b) with a in [row_begin, row_end). Accumulates
// differences into a p-bit scratch mask with an early exit once all of S has
// been seen; failures race on a global linear pair index so the reported
// failure is the row-major first one regardless of thread count.
inline void scan_rows(const CoveringFamily& fam, const CoverSet& S,
                      std::size_t row_begin, std::size_t row_end,
                      std::atomic<std::uint64_t>& first_bad) {
    const std::size_t n = fam.size();
    const int p = fam.modulus();
    const int needed_total = S.count();
    std::vector<std::uint64_t> mask(static_cast<std::size_t>((p + 63) / 64));
    const auto& swords = S.words();

    for (std::size_t a = row_begin; a < row_end; ++a) {
        const auto va = fam.row(a);
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            const std::uint64_t linear = static_cast<std::uint64_t>(a) * n + b;
            // The chunk is scanned in ascending row-major order, so once a
            // failure earlier than `linear` exists nothing left here matters.
            if (first_bad.load(std::memory_order_relaxed) < linear) return;
            const auto vb = fam.row(b);
            std::fill(mask.begin(), mask.end(), 0);
            int remaining = needed_total;
            for (int i = 0; i < fam.length(); ++i) {
                int d = static_cast<int>(va[i]) - static_cast<int>(vb[i]);
                if (d < 0) d += p;
                const std::size_t word = static_cast<std::size_t>(d) >> 6;
                const std::uint64_t bit = 1ull << (d & 63);
                if (!(mask[word] & bit)) {
                    mask[word] |= bit;
                    if (swords[word] & bit) {
                        if (--remaining == 0) break;
                    }
                }
            }
            if (remaining != 0) {
                std::uint64_t cur = first_bad.load(std::memory_order_relaxed);
                while (linear < cur &&
                       !first_bad.compare_exchange_weak(cur, linear, std::memory_order_relaxed)) {
                }
                return;  // nothing after this row-major position can beat it in this chunk
            }
        }
    }
}

}  // namespace detail

/// Exhaustive ordered-pair S-covering check. Deterministic: the reported
/// failure is always the row-major first failing ordered pair, and
/// checked_pairs counts the pairs a serial scan would have visited.
inline CoverageReport is_covering(const CoveringFamily& fam, const CoverSet& S,
                                  int threads = 1) {
    if (S.modulus() != fam.modulus())
        throw std::invalid_argument("is_covering: cover set modulus mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = fam.size();
    std::atomic<std::uint64_t> first_bad{std::numeric_limits<std::uint64_t>::max()};

    const int workers = std::max(1, threads);
    if (workers == 1 || n < 64) {
        detail::scan_rows(fam, S, 0, n, first_bad);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::size_t lo = std::min(n, static_cast<std::size_t>(w) * chunk);
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo < hi)
                pool.emplace_back(detail::scan_rows, std::cref(fam), std::cref(S), lo, hi,
                                  std::ref(first_bad));
        }
        for (auto& t : pool) t.join();
    }

    CoverageReport rep;
    const std::uint64_t bad = first_bad.load();
    if (bad == std::numeric_limits<std::uint64_t>::max()) {
        rep.is_covering = true;
        rep.checked_pairs = static_cast<std::uint64_t>(n) * (n - 1);
    } else {
        rep.is_covering = false;
        const std::size_t a = static_cast<std::size_t>(bad / n);
        const std::size_t b = static_cast<std::size_t>(bad % n);
        const CoverSet got = pair_cover_set(fam.row(a), fam.row(b), fam.modulus());
        const CoverSet missing = S.minus(got);
        rep.first_failure = PairFailure{a, b, missing.members().front()};
        // pairs visited by a serial scan up to and including (a, b)
        rep.checked_pairs = static_cast<std::uint64_t>(a) * (n - 1) + b - (b > a ? 1 : 0) + 1;
    }
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

struct DeficitEntry {
    std::size_t v_index;
    std::size_t w_index;
    CoverSet missing;
};

/// Every ordered pair whose difference set misses part of S, with the missing
/// elements. Empty iff the family is S-covering.
inline std::vector<DeficitEntry> cover_deficit(const CoveringFamily& fam, const CoverSet& S) {
    if (S.modulus() != fam.modulus())
        throw std::invalid_argument("cover_deficit: cover set modulus mismatch");
    std::vector<DeficitEntry> out;
    const std::size_t n = fam.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            const CoverSet got = pair_cover_set(fam.row(a), fam.row(b), fam.modulus());
            const CoverSet missing = S.minus(got);
            if (!missing.empty()) out.push_back({a, b, missing});
        }
    }
    return out;
}

/// Append `extra` zero coordinates to every vector. Every pair gains the
/// difference 0, so a (Z_p \ {0})-covering family becomes Z_p-covering.
inline CoveringFamily append_zeros(const CoveringFamily& fam, int extra) {
    if (extra < 1) throw std::invalid_argument("append_zeros: extra must be >= 1");
    const int ell = fam.length() + extra;
    std::vector<Entry> data;
    data.reserve(fam.size() * static_cast<std::size_t>(ell));
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const auto r = fam.row(i);
        data.insert(data.end(), r.begin(), r.end());
        data.insert(data.end(), static_cast<std::size_t>(extra), Entry{0});
    }
    std::optional<CoverSet> claim = fam.claimed_cover();
    if (claim) claim = claim->united(CoverSet::of(fam.modulus(), {0}));
    return CoveringFamily::create(PrimeModulus(fam.modulus()), ell, std::move(data),
                                  std::move(claim));
}

/// Cartesian concatenation: all |Fa| * |Fb| vectors (a, b). If both inputs
/// are S-covering, so is the result (pairs sharing one half differ in the
/// other).
inline CoveringFamily concat_families(const CoveringFamily& fa, const CoveringFamily& fb) {
    if (fa.modulus() != fb.modulus())
        throw std::invalid_argument("concat_families: modulus mismatch");
    const int ell = fa.length() + fb.length();
    const std::size_t count = fa.size() * fb.size();
    if (count * static_cast<std::size_t>(ell) * sizeof(Entry) > memory_budget())
        throw BudgetError("concat_families: result exceeds the memory budget");
    std::vector<Entry> data;
    data.reserve(count * static_cast<std::size_t>(ell));
    for (std::size_t i = 0; i < fa.size(); ++i) {
        for (std::size_t j = 0; j < fb.size(); ++j) {
            const auto ra = fa.row(i);
            const auto rb = fb.row(j);
            data.insert(data.end(), ra.begin(), ra.end());
            data.insert(data.end(), rb.begin(), rb.end());
        }
    }
    std::optional<CoverSet> claim;
    if (fa.claimed_cover() && fb.claimed_cover()) {
        // common claim only
        CoverSet inter = fa.claimed_cover()->minus(fa.claimed_cover()->minus(*fb.claimed_cover()));
        if (!inter.empty()) claim = inter;
    }
    return CoveringFamily::create(PrimeModulus(fa.modulus()), ell, std::move(data),
                                  std::move(claim));
}

// ---------------------------------------------------------------------------
// zpcf text format
//
//   # zpcf v1
//   p=<p> l=<ell> n=<N> s=<Zp|Zp*|comma list|none>
//   <N rows of ell space-separated integers in [0, p-1]>
//
// ASCII, '#' lines after the header are comments, trailing newline required.
// ---------------------------------------------------------------------------

inline void write_family(const CoveringFamily& fam, std::ostream& os) {
    os << "# zpcf v1\n";
    os << "p=" << fam.modulus() << " l=" << fam.length() << " n=" << fam.size() << " s=";
    if (fam.claimed_cover())
        os << fam.claimed_cover()->format();
    else
        os << "none";
    os << "\n";
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const auto r = fam.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) os << ' ';
            os << static_cast<int>(r[j]);
        }
        os << '\n';
    }
}

inline void write_family(const CoveringFamily& fam, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_family: cannot open " + path);
    write_family(fam, os);
    if (!os) throw std::runtime_error("write_family: write failed on " + path);
}

inline CoveringFamily read_family(std::istream& is, const std::string& name = "<stream>") {
    std::string content((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (content.empty() || content.back() != '\n')
        throw ParseError(name + ": missing trailing newline");

    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i < content.size(); ++i) {
        if (content[i] == '\n') {
            lines.push_back(content.substr(start, i - start));
            start = i + 1;
        }
    }

    auto fail = [&name](std::size_t line_no, const std::string& msg) -> ParseError {
        return ParseError(name + ":" + std::to_string(line_no) + ": " + msg);
    };

    if (lines.empty() || lines[0] != "# zpcf v1") throw fail(1, "expected '# zpcf v1' header");
    if (lines.size() < 2) throw fail(2, "missing parameter line");

    int p = -1, ell = -1;
    long long n = -1;
    std::string sspec;
    {
        std::istringstream ps(lines[1]);
        std::string tok;
        while (ps >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw fail(2, "malformed token '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            try {
                if (key == "p") p = std::stoi(val);
                else if (key == "l") ell = std::stoi(val);
                else if (key == "n") n = std::stoll(val);
                else if (key == "s") sspec = val;
                else throw fail(2, "unknown key '" + key + "'");
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception&) {
                throw fail(2, "bad value for '" + key + "'");
            }
        }
    }
    if (p < 2) throw fail(2, "p missing or < 2");
    if (!is_prime(static_cast<std::uint64_t>(p))) throw fail(2, "p=" + std::to_string(p) + " is not prime");
    if (ell < 1) throw fail(2, "l missing or < 1");
    if (n < 1) throw fail(2, "n missing or < 1");
    if (sspec.empty()) throw fail(2, "s missing");

    std::vector<Entry> data;
    data.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(ell));
    long long rows = 0;
    for (std::size_t li = 2; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        if (!line.empty() && line[0] == '#') continue;
        if (line.empty()) throw fail(li + 1, "blank line");
        if (rows == n) throw fail(li + 1, "more rows than n=" + std::to_string(n));
        std::istringstream rs(line);
        int got = 0;
        long long v;
        while (rs >> v) {
            if (v < 0 || v >= p)
                throw fail(li + 1, "entry " + std::to_string(v) + " out of range [0, " +
                                       std::to_string(p - 1) + "]");
            data.push_back(static_cast<Entry>(v));
            ++got;
        }
        if (!rs.eof()) throw fail(li + 1, "non-integer token");
        if (got != ell)
            throw fail(li + 1, "expected " + std::to_string(ell) + " entries, got " +
                                   std::to_string(got));
        ++rows;
    }
    if (rows != n)
        throw ParseError(name + ": expected " + std::to_string(n) + " rows, got " +
                         std::to_string(rows));

    std::optional<CoverSet> claim;
    if (sspec != "none") {
        try {
            claim = CoverSet::parse(sspec, p);
        } catch (const std::exception& e) {
            throw fail(2, e.what());
        }
    }
    try {
        return CoveringFamily::create(PrimeModulus(p), ell, std::move(data), std::move(claim));
    } catch (const std::invalid_argument& e) {
        throw ParseError(name + ": " + e.what());
    }
}

inline CoveringFamily read_family(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_family: cannot open " + path);
    return read_family(is, path);
}

}  // namespace zpcover
