#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zpcover/zp_core.hpp"

namespace zpcover {

/// A subset of Z_p kept as a p-bit mask. This is the "S" of S-covering:
/// the special sets Z_p, Z_p \ {0}, [0, k-1] and the iterated power sets
/// S_z all live here.
class CoverSet {
public:
    explicit CoverSet(int p) : p_(p), words_((p + 63) / 64, 0) {
        if (p < 2) throw std::invalid_argument("CoverSet: modulus must be >= 2");
    }

    static CoverSet all(int p) {
        CoverSet s(p);
        for (int e = 0; e < p; ++e) s.add(e);
        return s;
    }
    static CoverSet nonzero(int p) {
        CoverSet s(p);
        for (int e = 1; e < p; ++e) s.add(e);
        return s;
    }
    static CoverSet range(int p, int lo, int hi) {  // [lo, hi] inclusive
        CoverSet s(p);
        for (int e = lo; e <= hi; ++e) s.add(e);
        return s;
    }
    static CoverSet of(int p, const std::vector<int>& elems) {
        CoverSet s(p);
        for (int e : elems) s.add(e);
        return s;
    }

    int modulus() const { return p_; }

    void add(int e) {
        check(e);
        words_[static_cast<std::size_t>(e) >> 6] |= 1ull << (e & 63);
    }

    bool contains(int e) const {
        if (e < 0 || e >= p_) return false;
        return (words_[static_cast<std::size_t>(e) >> 6] >> (e & 63)) & 1;
    }

    int count() const {
        int n = 0;
        for (std::uint64_t w : words_) n += __builtin_popcountll(w);
        return n;
    }
    bool empty() const { return count() == 0; }

    bool subset_of(const CoverSet& other) const {
        require_same(other);
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if (words_[i] & ~other.words_[i]) return false;
        }
        return true;
    }

    CoverSet united(const CoverSet& other) const {
        require_same(other);
        CoverSet out(p_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            out.words_[i] = words_[i] | other.words_[i];
        return out;
    }

    CoverSet minus(const CoverSet& other) const {
        require_same(other);
        CoverSet out(p_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            out.words_[i] = words_[i] & ~other.words_[i];
        return out;
    }

    /// { -s mod p : s in S }
    CoverSet negated() const {
        CoverSet out(p_);
        for (int e = 0; e < p_; ++e) {
            if (contains(e)) out.add(e == 0 ? 0 : p_ - e);
        }
        return out;
    }

    /// { a*s mod p : s in S }
    CoverSet scaled(int a) const {
        CoverSet out(p_);
        const long long m = ((static_cast<long long>(a) % p_) + p_) % p_;
        for (int e = 0; e < p_; ++e) {
            if (contains(e)) out.add(static_cast<int>(m * e % p_));
        }
        return out;
    }

    bool closed_under_negation() const { return *this == negated(); }

    std::vector<int> members() const {
        std::vector<int> out;
        for (int e = 0; e < p_; ++e)
            if (contains(e)) out.push_back(e);
        return out;
    }

    bool operator==(const CoverSet& other) const {
        return p_ == other.p_ && words_ == other.words_;
    }
    bool operator!=(const CoverSet& other) const { return !(*this == other); }

    const std::vector<std::uint64_t>& words() const { return words_; }

    /// Render as the zpcf "s=" spec: Zp, Zp*, or a comma list.
    std::string format() const {
        if (*this == all(p_)) return "Zp";
        if (*this == nonzero(p_)) return "Zp*";
        std::ostringstream os;
        bool first = true;
        for (int e : members()) {
            if (!first) os << ',';
            os << e;
            first = false;
        }
        return first ? "none" : os.str();
    }

    /// Parse a zpcf spec string. "none" has no CoverSet; callers handle it
    /// before calling this.
    static CoverSet parse(const std::string& spec, int p) {
        if (spec == "Zp") return all(p);
        if (spec == "Zp*") return nonzero(p);
        CoverSet s(p);
        std::istringstream is(spec);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            std::size_t pos = 0;
            int e;
            try {
                e = std::stoi(tok, &pos);
            } catch (const std::exception&) {
                throw std::invalid_argument("CoverSet: bad element '" + tok + "'");
            }
            if (pos != tok.size())
                throw std::invalid_argument("CoverSet: bad element '" + tok + "'");
            s.add(e);
        }
        if (s.empty()) throw std::invalid_argument("CoverSet: empty spec '" + spec + "'");
        return s;
    }

private:
    void check(int e) const {
        if (e < 0 || e >= p_)
            throw std::out_of_range("CoverSet: element " + std::to_string(e) +
                                    " outside [0, " + std::to_string(p_ - 1) + "]");
    }
    void require_same(const CoverSet& other) const {
        if (p_ != other.p_)
            throw std::invalid_argument("CoverSet: modulus mismatch");
    }

    int p_;
    std::vector<std::uint64_t> words_;
};

}  // namespace zpcover
