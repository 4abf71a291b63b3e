#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zpcover/family.hpp"
#include "zpcover/rng.hpp"

namespace zpcover {

/// The clique instance behind the prophet-gambler gap: r disjoint cliques of
/// p elements, every element i.i.d. Bernoulli(1/p), feasible sets are the
/// within-clique subsets. Arrival order is clique-sequential (clique 0
/// positions 0..p-1, then clique 1, ...). p need not be prime here.
struct ProphetInstance {
    int p = 0;
    int r = 0;
    ProphetInstance(int p_, int r_) : p(p_), r(r_) {
        if (p < 2) throw std::invalid_argument("ProphetInstance: p must be >= 2");
        if (r < 1) throw std::invalid_argument("ProphetInstance: r must be >= 1");
    }
};

namespace detail {

inline double ipow(double base, long long exp) {
    double result = 1.0;
    while (exp > 0) {
        if (exp & 1) result *= base;
        base *= base;
        exp >>= 1;
    }
    return result;
}

/// CDF of Binomial(p, 1/p) at 0..p.
inline std::vector<double> binomial_cdf(int p) {
    std::vector<double> pmf(static_cast<std::size_t>(p) + 1);
    // C(p, s) (1/p)^s (1-1/p)^(p-s), built incrementally
    const double q = 1.0 / p;
    pmf[0] = ipow(1.0 - q, p);
    for (int s = 1; s <= p; ++s) {
        pmf[static_cast<std::size_t>(s)] = pmf[static_cast<std::size_t>(s - 1)] *
                                           (static_cast<double>(p - s + 1) / s) *
                                           (q / (1.0 - q));
    }
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < pmf.size(); ++s) {
        acc += pmf[s];
        cdf[s] = acc;
    }
    return cdf;
}

}  // namespace detail

/// Exact prophet value: E[max of r iid Binomial(p, 1/p)] as
/// sum_{t=1..p} (1 - F(t-1)^r). No sampling involved.
inline double prophet_expected_reward(const ProphetInstance& inst) {
    const auto cdf = detail::binomial_cdf(inst.p);
    double value = 0.0;
    for (int t = 1; t <= inst.p; ++t)
        value += 1.0 - detail::ipow(cdf[static_cast<std::size_t>(t - 1)], inst.r);
    return value;
}

/// Continuation values of the optimal gambler. cont[c][t] is the expected
/// value of proceeding unlocked past position t (1-based) of the clique
/// with c cliques remaining, i.e. U(c, t+1); accepting a 1 at (c, t) is
/// worth 1 + (p-t)/p (collect every later 1 of the clique, future cliques
/// are worthless once locked).
struct GamblerPolicy {
    int p = 0;
    int r = 0;
    std::vector<std::vector<double>> cont;  // cont[c][t], c in [1,r], t in [1,p]
    double value = 0.0;                     // V(r)

    bool accept(int cliques_remaining, int t) const {
        const double lock = 1.0 + static_cast<double>(p - t) / p;
        return lock >= cont[static_cast<std::size_t>(cliques_remaining)]
                           [static_cast<std::size_t>(t)];
    }
};

inline constexpr long long kProphetExactBudget = 50'000'000;

inline GamblerPolicy gambler_policy(const ProphetInstance& inst) {
    const long long states = static_cast<long long>(inst.p) * inst.r;
    if (states > kProphetExactBudget)
        throw BudgetError("gambler_policy: r*p exceeds the exact-computation budget");
    GamblerPolicy pol;
    pol.p = inst.p;
    pol.r = inst.r;
    pol.cont.assign(static_cast<std::size_t>(inst.r) + 1,
                    std::vector<double>(static_cast<std::size_t>(inst.p) + 1, 0.0));
    const double hit = 1.0 / inst.p;
    double v_prev = 0.0;  // V(c-1)
    for (int c = 1; c <= inst.r; ++c) {
        double u = v_prev;  // U(c, p+1) = V(c-1)
        for (int t = inst.p; t >= 1; --t) {
            pol.cont[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] = u;
            const double lock = 1.0 + static_cast<double>(inst.p - t) / inst.p;
            u = hit * std::max(lock, u) + (1.0 - hit) * u;
        }
        v_prev = u;  // V(c) = U(c, 1)
    }
    pol.value = v_prev;
    return pol;
}

/// Exact optimal-gambler value under the canonical arrival order.
inline double gambler_optimal_value(const ProphetInstance& inst) {
    return gambler_policy(inst).value;
}

struct McEstimate {
    double estimate = 0.0;
    double ci_half_width = 0.0;  // 95% normal approximation
    long long samples = 0;
    std::uint64_t seed = 0;
};

/// Seeded Monte Carlo cross-check. One pass per sample: the prophet takes
/// the best clique sum, the gambler replays the exact policy's threshold
/// decisions on the same realization. Bit-identical for a fixed seed.
inline std::pair<McEstimate, McEstimate> simulate_mc(const ProphetInstance& inst,
                                                     long long samples,
                                                     std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("simulate_mc: samples must be >= 1");
    const GamblerPolicy pol = gambler_policy(inst);
    Rng rng(seed);

    double psum = 0.0, psq = 0.0, gsum = 0.0, gsq = 0.0;
    for (long long s = 0; s < samples; ++s) {
        int best = 0;
        double greward = 0.0;
        bool locked = false, done = false;
        for (int c = inst.r; c >= 1; --c) {
            int ones = 0;
            for (int t = 1; t <= inst.p; ++t) {
                const bool one = rng.below(static_cast<std::uint64_t>(inst.p)) == 0;
                if (one) ++ones;
                if (!done) {
                    if (locked) {
                        if (one) greward += 1.0;
                    } else if (one && pol.accept(c, t)) {
                        greward += 1.0;
                        locked = true;
                    }
                }
            }
            if (locked) done = true;  // the lock clique has ended; nothing else is feasible
            best = std::max(best, ones);
        }
        psum += best;
        psq += static_cast<double>(best) * best;
        gsum += greward;
        gsq += greward * greward;
    }

    auto finish = [samples, seed](double sum, double sq) {
        McEstimate e;
        e.samples = samples;
        e.seed = seed;
        e.estimate = sum / samples;
        const double var = samples > 1 ? (sq - sum * sum / samples) / (samples - 1) : 0.0;
        e.ci_half_width = 1.96 * std::sqrt(std::max(0.0, var) / samples);
        return e;
    };
    return {finish(psum, psq), finish(gsum, gsq)};
}

struct ValueReport {
    int p = 0;
    int r = 0;
    double prophet_exact = 0.0;
    double gambler_exact = 0.0;
    double ratio = 0.0;
    std::optional<McEstimate> prophet_mc;
    std::optional<McEstimate> gambler_mc;
    bool r_is_p_pow_p = false;
    std::optional<double> prophet_lb;  // (1 - 1/e) p, claimed when r = p^p
    double gambler_ub = 2.0;
    std::optional<double> ratio_lb;    // (1 - 1/e) p / 2, claimed when r = p^p
    bool bounds_pass = false;
};

/// Full gap report for the instance. When r = p^p the paper's bounds are
/// attached and checked: prophet >= (1-1/e)p and ratio >= (1-1/e)p/2.
inline ValueReport gap_report(const ProphetInstance& inst,
                              std::optional<long long> mc_samples = std::nullopt,
                              std::uint64_t seed = 0) {
    ValueReport rep;
    rep.p = inst.p;
    rep.r = inst.r;
    rep.prophet_exact = prophet_expected_reward(inst);
    rep.gambler_exact = gambler_optimal_value(inst);
    rep.ratio = rep.prophet_exact / rep.gambler_exact;

    if (rep.gambler_exact > rep.prophet_exact + 1e-9 || rep.gambler_exact > 2.0 + 1e-9)
        throw std::logic_error("gap_report: gambler value violates its invariants");

    // is r = p^p (within long long range)?
    {
        long long pw = 1;
        bool ok = true;
        for (int i = 0; i < inst.p && ok; ++i) {
            if (pw > (std::numeric_limits<long long>::max)() / inst.p) ok = false;
            else pw *= inst.p;
        }
        rep.r_is_p_pow_p = ok && pw == inst.r;
    }
    rep.bounds_pass = rep.gambler_exact <= rep.gambler_ub + 1e-12;
    if (rep.r_is_p_pow_p) {
        const double e1 = 1.0 - std::exp(-1.0);
        rep.prophet_lb = e1 * inst.p;
        rep.ratio_lb = e1 * inst.p / 2.0;
        rep.bounds_pass = rep.bounds_pass && rep.prophet_exact >= *rep.prophet_lb - 1e-12 &&
                          rep.ratio >= *rep.ratio_lb - 1e-12;
    }

    if (mc_samples) {
        auto [pm, gm] = simulate_mc(inst, *mc_samples, seed);
        rep.prophet_mc = pm;
        rep.gambler_mc = gm;
    }
    return rep;
}

}  // namespace zpcover
