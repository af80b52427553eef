#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "monosum/multi_index.hpp"
#include "monosum/rational.hpp"

namespace monosum {

/// The monomial x^alpha together with the level k and a weight vector s on
/// the closed simplex. Houses the derived quantities lambda_j = s_j/(alpha_j k),
/// lambda'_j = alpha_j k/s_j and the weighted index set J_s. Variables with
/// zero weight are inert: every transform leaves them untouched.
class MonomialOrder {
public:
    MonomialOrder(MultiIndex alpha, Rational k, std::vector<Rational> s)
        : alpha_(std::move(alpha)), k_(std::move(k)), s_(std::move(s)) {
        if (!alpha_.all_positive()) throw std::invalid_argument("MonomialOrder: alpha entries must be >= 1");
        if (k_ <= 0) throw std::invalid_argument("MonomialOrder: k must be positive");
        if (static_cast<int>(s_.size()) != alpha_.dim())
            throw std::invalid_argument("MonomialOrder: weight count != dim");
        Rational sum(0);
        for (const auto& w : s_) {
            if (w < 0) throw std::invalid_argument("MonomialOrder: negative weight");
            sum += w;
        }
        if (std::abs(to_double(sum) - 1.0) > 1e-12)
            throw std::invalid_argument("MonomialOrder: weights must sum to 1");
        lambda_.resize(s_.size());
        for (size_t j = 0; j < s_.size(); ++j) {
            if (s_[j] != 0) {
                weighted_.push_back(static_cast<int>(j));
                lambda_[j] = s_[j] / (Rational(alpha_[static_cast<int>(j)]) * k_);
            } else {
                lambda_[j] = 0;
            }
        }
        if (weighted_.empty()) throw std::invalid_argument("MonomialOrder: J_s must be non-empty");
    }

    /// Balanced default weights s_j = alpha_j/|alpha|.
    static MonomialOrder balanced(const MultiIndex& alpha, Rational k) {
        std::vector<Rational> s(alpha.dim());
        Rational tot(alpha.degree());
        for (int j = 0; j < alpha.dim(); ++j) s[j] = Rational(alpha[j]) / tot;
        return MonomialOrder(alpha, std::move(k), std::move(s));
    }

    int dim() const { return alpha_.dim(); }
    const MultiIndex& alpha() const { return alpha_; }
    const Rational& k() const { return k_; }
    const std::vector<Rational>& weights() const { return s_; }
    const std::vector<Rational>& lambda() const { return lambda_; }
    const std::vector<int>& weighted_indices() const { return weighted_; }
    bool is_weighted(int j) const { return s_[j] != 0; }

    Rational lambda_prime(int j) const {
        if (s_[j] == 0) return Rational(0);
        return Rational(alpha_[j]) * k_ / s_[j];
    }

    /// <beta, lambda> as an exact rational.
    Rational pairing(const MultiIndex& beta) const {
        Rational r(0);
        for (int j : weighted_) r += Rational(beta[j]) * lambda_[j];
        return r;
    }

    /// k*alpha_j for weighted j, 0 for inert j (the Borel offset is its negative).
    Rational threshold(int j) const { return is_weighted(j) ? k_ * Rational(alpha_[j]) : Rational(0); }

    /// k*alpha restricted to J_s as an integer exponent shift; throws when some
    /// k*alpha_j is not an integer, since it then has no place on the grid.
    MultiIndex integer_shift() const {
        MultiIndex shift(dim());
        for (int j : weighted_) {
            Rational t = threshold(j);
            if (!is_integer(t))
                throw std::domain_error("MonomialOrder: k*alpha_j is not an integer exponent");
            shift[j] = static_cast<int>(t.get_num().get_si());
        }
        return shift;
    }

    friend bool operator==(const MonomialOrder& a, const MonomialOrder& b) {
        return a.alpha_ == b.alpha_ && a.k_ == b.k_ && a.s_ == b.s_;
    }
    friend bool operator!=(const MonomialOrder& a, const MonomialOrder& b) { return !(a == b); }

private:
    MultiIndex alpha_;
    Rational k_;
    std::vector<Rational> s_;
    std::vector<Rational> lambda_;
    std::vector<int> weighted_;
};

}  // namespace monosum
