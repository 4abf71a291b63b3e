#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zpcover/cover_set.hpp"
#include "zpcover/family.hpp"
#include "zpcover/zp_core.hpp"

namespace zpcover {

/// Lower bound on AAM(p, N): ell >= p always (two distinct vectors need p
/// coordinates to cover Z_p), and ell >= log_{2 + 12/(p-6)} N for p >= 7.
inline double aam_lower_bound(const PrimeModulus& p, double log2N) {
    require_odd_prime(p, "aam_lower_bound");
    const double pd = static_cast<double>(p.value());
    if (p.value() < 7) return pd;
    const double base_log = std::log2(2.0 + 12.0 / (pd - 6.0));
    return std::max(pd, log2N / base_log);
}

/// Trivial upper bound p * ceil(log_p N) from the base-p construction,
/// with N = 1 mapping to p (one digit).
inline long long aam_upper_trivial(const PrimeModulus& p, long long N) {
    if (N < 1) throw std::invalid_argument("aam_upper_trivial: N must be >= 1");
    const long long q = p.value();
    int digits = 1;
    long long cap = q;
    while (cap < N) {
        if (cap > (std::numeric_limits<long long>::max)() / q)
            throw std::invalid_argument("aam_upper_trivial: N too large");
        cap *= q;
        ++digits;
    }
    return q * digits;
}

/// The agnostic-concatenation ceiling: no (z, k, k', p)-agnostic procedure
/// boosts the size by more than 4kz/k'.
inline double agnostic_boost_bound(int k, int z, int kprime) {
    if (k < 1 || z < 1 || kprime < 1)
        throw std::invalid_argument("agnostic_boost_bound: arguments must be positive");
    return 4.0 * k * z / kprime;
}

struct BoundReport {
    int p = 0;
    double log2N = 0.0;
    double lower = 0.0;
    double upper_trivial = 0.0;
    std::optional<double> upper_pipeline;  // ell3 bound from select_parameters, log2N >= 4 only
    bool consistent = false;
};

inline BoundReport make_bound_report(const PrimeModulus& p, double log2N) {
    if (log2N < 0.0) throw std::invalid_argument("make_bound_report: log2N must be >= 0");
    BoundReport rep;
    rep.p = p.value();
    rep.log2N = log2N;
    rep.lower = aam_lower_bound(p, log2N);
    const double digits = std::max(1.0, std::ceil(log2N / std::log2(p.value())));
    rep.upper_trivial = p.value() * digits;
    if (log2N >= 4.0)
        rep.upper_pipeline = static_cast<double>(select_parameters(p, log2N).ell3_bound);
    rep.consistent = rep.lower <= rep.upper_trivial + 1e-9 &&
                     (!rep.upper_pipeline || rep.lower <= *rep.upper_pipeline + 1e-9);
    if (!rep.consistent)
        throw std::logic_error("make_bound_report: lower bound exceeded an upper bound");
    return rep;
}

/// Witness for the agnostic-concatenation limitation. For a family with
/// entries in [0, 2k-1], every slot's scaled difference set S_j has at most
/// 4k-1 elements, so some h in S' lies in few slots; any S'-covering subset
/// of the concatenation set is then determined by its coordinates in those
/// slots, capping its size at |V|^|T_h|.
struct AgnosticWitness {
    int k = 0;
    int z = 0;
    int kprime = 0;
    std::vector<int> alphas;
    std::vector<CoverSet> slot_sets;     // S_j per slot
    int h = 0;                           // element of S' hitting fewest slots
    std::vector<int> slots_with_h;       // T_h, 0-based slot indices
    int certified_exponent = 0;          // |T_h|
};

inline AgnosticWitness agnostic_witness(const CoveringFamily& V, int k,
                                        const std::vector<int>& alphas,
                                        const CoverSet& Sprime) {
    const int p = V.modulus();
    if (Sprime.modulus() != p)
        throw std::invalid_argument("agnostic_witness: S' modulus mismatch");
    if (k < 2 || 2 * k - 1 > p - 1)
        throw std::invalid_argument("agnostic_witness: need 2 <= k and 2k-1 <= p-1");
    for (std::size_t i = 0; i < V.size(); ++i) {
        for (Entry e : V.row(i)) {
            if (e > 2 * k - 1)
                throw std::invalid_argument("agnostic_witness: entry " + std::to_string(e) +
                                            " outside [0, 2k-1]");
        }
    }
    if (alphas.empty()) throw std::invalid_argument("agnostic_witness: no slots");
    for (int a : alphas) {
        if (((a % p) + p) % p == 0)
            throw std::domain_error("agnostic_witness: scalars must be nonzero");
    }
    if (Sprime.empty() || Sprime.contains(0))
        throw std::invalid_argument("agnostic_witness: S' must be nonempty and exclude 0");

    // All ordered-pair coordinate differences of V, computed once.
    CoverSet diffs(p);
    for (std::size_t a = 0; a < V.size(); ++a) {
        for (std::size_t b = 0; b < V.size(); ++b) {
            if (a == b) continue;
            const auto ra = V.row(a), rb = V.row(b);
            for (int i = 0; i < V.length(); ++i) {
                int d = static_cast<int>(ra[static_cast<std::size_t>(i)]) -
                        static_cast<int>(rb[static_cast<std::size_t>(i)]);
                if (d < 0) d += p;
                diffs.add(d);
            }
        }
    }

    AgnosticWitness w;
    w.k = k;
    w.z = static_cast<int>(alphas.size());
    w.kprime = Sprime.count();
    w.alphas = alphas;
    for (int a : alphas) w.slot_sets.push_back(diffs.scaled(a));

    int best_h = -1, best_count = w.z + 1;
    for (int h : Sprime.members()) {
        int count = 0;
        for (const CoverSet& sj : w.slot_sets)
            if (sj.contains(h)) ++count;
        if (count < best_count) {  // ties resolve to the smallest h (members ascend)
            best_count = count;
            best_h = h;
        }
    }
    w.h = best_h;
    for (int j = 0; j < w.z; ++j)
        if (w.slot_sets[static_cast<std::size_t>(j)].contains(best_h))
            w.slots_with_h.push_back(j);
    w.certified_exponent = static_cast<int>(w.slots_with_h.size());
    return w;
}

}  // namespace zpcover
