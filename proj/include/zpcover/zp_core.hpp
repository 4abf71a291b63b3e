#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace zpcover {

/// Deterministic primality check by trial division. Not constant-time, not
/// for cryptography; the moduli handled here are small.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

/// A validated prime modulus. Most of the machinery runs over odd primes
/// p >= 3, but the bit-lift construction consumes source families over
/// modulus 2, so 2 is admitted here and oddness is enforced per operation.
class PrimeModulus {
public:
    explicit PrimeModulus(int p) : p_(p) {
        if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
            throw std::invalid_argument("PrimeModulus: " + std::to_string(p) + " is not prime");
    }
    int value() const { return p_; }
    bool odd() const { return p_ % 2 == 1; }

private:
    int p_;
};

inline void require_odd_prime(const PrimeModulus& p, const char* where) {
    if (!p.odd())
        throw std::invalid_argument(std::string(where) + ": modulus must be an odd prime, got 2");
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t result = 1;
    base %= mod;
    while (exp > 0) {
        if (exp & 1) result = result * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return result;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

/// Smallest generator of the multiplicative group mod p.
inline int primitive_root(const PrimeModulus& p) {
    require_odd_prime(p, "primitive_root");
    const std::uint64_t q = static_cast<std::uint64_t>(p.value());
    const auto factors = prime_factors(q - 1);
    for (std::uint64_t g = 2; g < q; ++g) {
        bool generates = true;
        for (std::uint64_t f : factors) {
            if (pow_mod(g, (q - 1) / f, q) == 1) {
                generates = false;
                break;
            }
        }
        if (generates) return static_cast<int>(g);
    }
    throw std::logic_error("primitive_root: no generator found");  // unreachable for prime p
}

inline int mod_inverse(int a, const PrimeModulus& p) {
    const int q = p.value();
    const int r = ((a % q) + q) % q;
    if (r == 0) throw std::domain_error("mod_inverse: 0 has no inverse");
    return static_cast<int>(pow_mod(static_cast<std::uint64_t>(r),
                                    static_cast<std::uint64_t>(q - 2),
                                    static_cast<std::uint64_t>(q)));
}

/// Number of bits needed to index [0, k-1], i.e. ceil(log2 k), computed
/// without floating point so exact powers of two do not wobble.
inline int ceil_log2(int k) {
    if (k <= 1) return 0;
    int bits = 0;
    unsigned v = static_cast<unsigned>(k - 1);
    while (v > 0) {
        ++bits;
        v >>= 1;
    }
    return bits;
}

/// The parameter arithmetic behind the three-stage covering pipeline.
/// N is carried as log2(N) so the target family size never has to be
/// materialized as an integer.
struct ParameterSelection {
    int p = 0;
    double log2N = 0.0;
    int k = 0;                    // largest feasible prime, k <= p
    long long ell1 = 0;           // ceil(2 log2 N)
    long long ell2 = 0;           // 2 * ell1 * ceil(log2 k)
    long long sizeS_bound = 0;    // ceil(p ln p / (k-1))
    long long ell3_bound = 0;     // sizeS_bound * ell2
    double ell_star = 0.0;        // p log2(p) log2(N) / sqrt(k)
};

/// Feasibility of a candidate k: k^(5 log2 log2 k) <= log2 N. The exponent
/// is 0 at k = 2 (log2 log2 2 = 0), so k = 2 is always feasible.
inline bool parameter_k_feasible(int k, double log2N) {
    if (k == 2) return true;
    const double expo = 5.0 * std::log2(std::log2(static_cast<double>(k)));
    return expo * std::log2(static_cast<double>(k)) <= std::log2(log2N);
}

/// Pick k = the largest feasible prime <= min(p, search_cap) and derive the
/// pipeline lengths. search_cap = 0 means "cap at p".
inline ParameterSelection select_parameters(const PrimeModulus& p, double log2N,
                                            int search_cap = 0) {
    if (log2N < 4.0)
        throw std::invalid_argument("select_parameters: log2N must be >= 4");
    const int cap = search_cap > 0 ? std::min(search_cap, p.value()) : p.value();
    int k = 0;
    for (int cand = 2; cand <= cap; ++cand) {
        if (!is_prime(static_cast<std::uint64_t>(cand))) continue;
        if (parameter_k_feasible(cand, log2N)) k = cand;
    }
    if (k == 0) throw std::logic_error("select_parameters: no feasible prime k");  // k=2 always fits

    ParameterSelection sel;
    sel.p = p.value();
    sel.log2N = log2N;
    sel.k = k;
    sel.ell1 = static_cast<long long>(std::ceil(2.0 * log2N));
    sel.ell2 = 2 * sel.ell1 * ceil_log2(k);
    const double pd = static_cast<double>(p.value());
    sel.sizeS_bound = static_cast<long long>(std::ceil(pd * std::log(pd) / (k - 1)));
    sel.ell3_bound = sel.sizeS_bound * sel.ell2;
    sel.ell_star = pd * std::log2(pd) * log2N / std::sqrt(static_cast<double>(k));
    return sel;
}

}  // namespace zpcover
