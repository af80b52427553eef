#pragma once

#include <cstdlib>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace monosum {

/// Exponent tuple in N^d. Componentwise partial order plus a total
/// lexicographic order used for deterministic map storage.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(int dim) : e_(dim, 0) {}
    MultiIndex(std::initializer_list<int> v) : e_(v) { check(); }
    explicit MultiIndex(std::vector<int> v) : e_(std::move(v)) { check(); }

    static MultiIndex unit(int dim, int j) {
        MultiIndex b(dim);
        b.e_[j] = 1;
        return b;
    }

    int dim() const { return static_cast<int>(e_.size()); }
    int operator[](int j) const { return e_[j]; }
    int& operator[](int j) { return e_[j]; }

    long degree() const { return std::accumulate(e_.begin(), e_.end(), 0L); }

    /// Componentwise beta <= alpha.
    bool leq(const MultiIndex& other) const {
        for (int j = 0; j < dim(); ++j)
            if (e_[j] > other.e_[j]) return false;
        return true;
    }
    /// Strict componentwise beta < alpha (every entry strictly smaller).
    bool lt(const MultiIndex& other) const {
        for (int j = 0; j < dim(); ++j)
            if (e_[j] >= other.e_[j]) return false;
        return true;
    }
    bool all_positive() const {
        for (int v : e_)
            if (v < 1) return false;
        return true;
    }
    bool is_zero() const {
        for (int v : e_)
            if (v != 0) return false;
        return true;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r(*this);
        for (int j = 0; j < dim(); ++j) r.e_[j] += o.e_[j];
        return r;
    }
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex r(*this);
        for (int j = 0; j < dim(); ++j) {
            r.e_[j] -= o.e_[j];
            if (r.e_[j] < 0) throw std::domain_error("MultiIndex: negative exponent");
        }
        return r;
    }
    MultiIndex scaled(int n) const {
        MultiIndex r(*this);
        for (int& v : r.e_) v *= n;
        return r;
    }
    /// this - n*o, or nullopt-like failure via flag.
    bool try_subtract(const MultiIndex& o, int n, MultiIndex& out) const {
        out = *this;
        for (int j = 0; j < dim(); ++j) {
            out.e_[j] -= n * o.e_[j];
            if (out.e_[j] < 0) return false;
        }
        return true;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.e_ == b.e_; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return a.e_ != b.e_; }
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.e_ < b.e_; }

    friend std::ostream& operator<<(std::ostream& os, const MultiIndex& b) {
        os << '(';
        for (int j = 0; j < b.dim(); ++j) os << (j ? "," : "") << b.e_[j];
        return os << ')';
    }

private:
    void check() const {
        for (int v : e_)
            if (v < 0) throw std::domain_error("MultiIndex: negative exponent");
    }
    std::vector<int> e_;
};

}  // namespace monosum
