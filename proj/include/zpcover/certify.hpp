#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zpcover/family.hpp"
#include "zpcover/rng.hpp"

namespace zpcover {

/// q proper colorings of Q(p, r) (r disjoint p-cliques) witnessing
/// PD(p, r) <= q. Vertex (j, i) is position i of clique j, stored row-major
/// as element j*p + i; colors come from [0, p-1].
struct ColoringCertificate {
    int p = 0;
    int r = 0;
    int q = 0;
    std::vector<std::vector<int>> colorings;  // q entries, each r*p colors
};

struct CertificateFailure {
    std::string reason;   // "improper" or "uncovered"
    int coloring = -1;    // improper: which coloring
    int j1 = 0, i1 = 0;   // first vertex
    int j2 = 0, i2 = 0;   // second vertex
};

/// Build the certificate from a Z_p-covering family: coloring k gives vertex
/// (j, i) the color v^j_k + i mod p. Properness is immediate (i varies over
/// a full residue system); non-adjacent coverage is exactly the covering
/// property: v^j_k - v^j'_k = i' - i has a solution k.
inline ColoringCertificate family_to_colorings(const CoveringFamily& fam, int r,
                                               int threads = 1) {
    if (r < 1 || static_cast<std::size_t>(r) > fam.size())
        throw std::invalid_argument("family_to_colorings: need 1 <= r <= |F|");
    {
        const CoverageReport rep = is_covering(fam, CoverSet::all(fam.modulus()), threads);
        if (!rep.is_covering)
            throw VerificationError("family_to_colorings: family is not Z_p-covering", rep);
    }
    const int p = fam.modulus();
    ColoringCertificate cert{p, r, fam.length(), {}};
    cert.colorings.resize(static_cast<std::size_t>(fam.length()));
    for (int k = 0; k < fam.length(); ++k) {
        auto& col = cert.colorings[static_cast<std::size_t>(k)];
        col.resize(static_cast<std::size_t>(r) * static_cast<std::size_t>(p));
        for (int j = 0; j < r; ++j) {
            const int vjk = fam.row(static_cast<std::size_t>(j))[static_cast<std::size_t>(k)];
            for (int i = 0; i < p; ++i)
                col[static_cast<std::size_t>(j * p + i)] = (vjk + i) % p;
        }
    }
    return cert;
}

/// Exhaustively check both certificate invariants: every coloring is proper
/// inside every clique, and every cross-clique vertex pair shares a color in
/// some coloring. Returns the first violation found (cliques scanned in
/// order, then cross-clique pairs in row-major order).
inline std::optional<CertificateFailure> verify_certificate(const ColoringCertificate& cert) {
    const int p = cert.p, r = cert.r, q = cert.q;
    if (q < 1 || static_cast<int>(cert.colorings.size()) != q)
        return CertificateFailure{"malformed", -1, 0, 0, 0, 0};
    for (const auto& col : cert.colorings)
        if (static_cast<int>(col.size()) != r * p)
            return CertificateFailure{"malformed", -1, 0, 0, 0, 0};

    for (int k = 0; k < q; ++k) {
        const auto& col = cert.colorings[static_cast<std::size_t>(k)];
        for (int j = 0; j < r; ++j) {
            std::vector<char> seen(static_cast<std::size_t>(p), 0);
            for (int i = 0; i < p; ++i) {
                const int c = col[static_cast<std::size_t>(j * p + i)];
                if (c < 0 || c >= p || seen[static_cast<std::size_t>(c)]) {
                    // find the earlier vertex with the clashing color
                    for (int i0 = 0; i0 < i; ++i0) {
                        if (col[static_cast<std::size_t>(j * p + i0)] == c)
                            return CertificateFailure{"improper", k, j, i0, j, i};
                    }
                    return CertificateFailure{"improper", k, j, i, j, i};
                }
                seen[static_cast<std::size_t>(c)] = 1;
            }
        }
    }
    for (int j1 = 0; j1 < r; ++j1) {
        for (int i1 = 0; i1 < p; ++i1) {
            for (int j2 = j1 + 1; j2 < r; ++j2) {
                for (int i2 = 0; i2 < p; ++i2) {
                    bool shared = false;
                    for (int k = 0; k < q && !shared; ++k) {
                        const auto& col = cert.colorings[static_cast<std::size_t>(k)];
                        shared = col[static_cast<std::size_t>(j1 * p + i1)] ==
                                 col[static_cast<std::size_t>(j2 * p + i2)];
                    }
                    if (!shared)
                        return CertificateFailure{"uncovered", -1, j1, i1, j2, i2};
                }
            }
        }
    }
    return std::nullopt;
}

/// The q partition matroids of the certificate: partition k groups the r*p
/// elements by their color in coloring k. Equivalently a q-partite
/// q-dimensional hypergraph with one hyperedge per vertex.
struct MatroidExport {
    int p = 0;
    int r = 0;
    int q = 0;
    std::vector<std::vector<int>> partitions;  // q x (r*p) part ids
    std::vector<std::vector<int>> hyperedges;  // (r*p) x q part coordinates
};

inline MatroidExport export_partition_matroids(const ColoringCertificate& cert) {
    if (auto bad = verify_certificate(cert))
        throw std::invalid_argument("export_partition_matroids: certificate failed verification (" +
                                    bad->reason + ")");
    MatroidExport out{cert.p, cert.r, cert.q, {}, {}};
    const std::size_t elements = static_cast<std::size_t>(cert.r) * cert.p;
    out.partitions = cert.colorings;  // color class = part id
    out.hyperedges.assign(elements, std::vector<int>(static_cast<std::size_t>(cert.q)));
    for (int k = 0; k < cert.q; ++k)
        for (std::size_t e = 0; e < elements; ++e)
            out.hyperedges[e][static_cast<std::size_t>(k)] =
                cert.colorings[static_cast<std::size_t>(k)][e];
    return out;
}

namespace detail {

inline bool subset_feasible(const MatroidExport& ex, const std::vector<int>& elems) {
    for (int k = 0; k < ex.q; ++k) {
        const auto& part = ex.partitions[static_cast<std::size_t>(k)];
        for (std::size_t a = 0; a < elems.size(); ++a)
            for (std::size_t b = a + 1; b < elems.size(); ++b)
                if (part[static_cast<std::size_t>(elems[a])] ==
                    part[static_cast<std::size_t>(elems[b])])
                    return false;
    }
    return true;
}

inline bool subset_within_clique(const MatroidExport& ex, const std::vector<int>& elems) {
    for (std::size_t a = 1; a < elems.size(); ++a)
        if (elems[a] / ex.p != elems[0] / ex.p) return false;
    return true;
}

}  // namespace detail

enum class MatroidCheckMode { exhaustive, sampled };

/// Check that the intersection of the partition matroids is exactly the
/// within-clique subsets. Exhaustive mode enumerates all subsets of the r*p
/// elements (guarded r*p <= 12); sampled mode draws random subsets of size
/// at most p+1, which is where any violation must already show up (a bad
/// pair is a bad subset of size 2).
inline bool verify_matroid_intersection_equals_cliques(
    const MatroidExport& ex, MatroidCheckMode mode = MatroidCheckMode::exhaustive,
    std::uint64_t seed = 0, int samples = 20000) {
    const int n = ex.r * ex.p;
    if (mode == MatroidCheckMode::exhaustive) {
        if (n > 12)
            throw std::invalid_argument(
                "verify_matroid_intersection_equals_cliques: exhaustive mode guarded to r*p <= 12");
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> elems;
            for (int e = 0; e < n; ++e)
                if ((mask >> e) & 1) elems.push_back(e);
            if (detail::subset_feasible(ex, elems) != detail::subset_within_clique(ex, elems))
                return false;
        }
        return true;
    }
    Rng rng(seed);
    for (int s = 0; s < samples; ++s) {
        const int size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(ex.p + 1)));
        std::vector<int> elems;
        for (int i = 0; i < size; ++i) {
            const int e = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            bool dup = false;
            for (int prev : elems) dup = dup || prev == e;
            if (!dup) elems.push_back(e);
        }
        if (detail::subset_feasible(ex, elems) != detail::subset_within_clique(ex, elems))
            return false;
    }
    return true;
}

}  // namespace zpcover
