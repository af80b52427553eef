#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "monosum/monomial_order.hpp"
#include "monosum/multi_index.hpp"
#include "monosum/rational.hpp"

namespace monosum {

/// Truncated multivariate formal power series: a sparse map from exponent
/// tuples to coefficient vectors of fixed length, carried up to a total
/// degree bound. Absent keys are exactly zero. All operations are pure and
/// return fresh values; arithmetic on two series truncates at the smaller
/// of the two orders.
template <class S>
class TruncatedSeries {
public:
    using Scalar = S;
    using Coeff = Eigen::Matrix<S, Eigen::Dynamic, 1>;
    using Map = std::map<MultiIndex, Coeff>;

    TruncatedSeries() : dim_(0), ncomp_(1), trunc_(0) {}
    TruncatedSeries(int dim, long trunc, int ncomp = 1) : dim_(dim), ncomp_(ncomp), trunc_(trunc) {
        if (dim < 1 || ncomp < 1 || trunc < 0) throw std::invalid_argument("TruncatedSeries: bad shape");
    }

    static TruncatedSeries zero(int dim, long trunc, int ncomp = 1) {
        return TruncatedSeries(dim, trunc, ncomp);
    }
    static TruncatedSeries constant(int dim, long trunc, const S& value) {
        TruncatedSeries f(dim, trunc, 1);
        f.set_coeff(MultiIndex(dim), value);
        return f;
    }
    static TruncatedSeries monomial(const MultiIndex& beta, const S& value, long trunc, int ncomp = 1,
                                    int comp = 0) {
        TruncatedSeries f(beta.dim(), trunc, ncomp);
        Coeff v = Coeff::Constant(ncomp, scalar_traits<S>::zero());
        v(comp) = value;
        if (beta.degree() <= trunc) f.coeffs_[beta] = std::move(v);
        return f;
    }

    int dim() const { return dim_; }
    int ncomp() const { return ncomp_; }
    long trunc_order() const { return trunc_; }
    const Map& terms() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }

    Coeff coeff(const MultiIndex& beta) const {
        auto it = coeffs_.find(beta);
        if (it != coeffs_.end()) return it->second;
        return Coeff::Constant(ncomp_, scalar_traits<S>::zero());
    }
    S coeff1(const MultiIndex& beta) const { return coeff(beta)(0); }

    void set_coeff(const MultiIndex& beta, Coeff value) {
        check_key(beta);
        if (static_cast<int>(value.size()) != ncomp_) throw std::invalid_argument("coefficient length mismatch");
        coeffs_[beta] = std::move(value);
    }
    void set_coeff(const MultiIndex& beta, const S& value) {
        Coeff v = Coeff::Constant(ncomp_, scalar_traits<S>::zero());
        v(0) = value;
        set_coeff(beta, std::move(v));
    }
    void add_to(const MultiIndex& beta, const Coeff& value) {
        check_key(beta);
        auto it = coeffs_.find(beta);
        if (it == coeffs_.end())
            coeffs_[beta] = value;
        else
            it->second += value;
    }

    /// Drop stored zeros in numeric mode; exact mode keeps them.
    TruncatedSeries& normalize() {
        if constexpr (!scalar_traits<S>::exact) {
            for (auto it = coeffs_.begin(); it != coeffs_.end();) {
                bool zero = true;
                for (int c = 0; c < ncomp_ && zero; ++c)
                    if (!scalar_traits<S>::is_zero(it->second(c))) zero = false;
                it = zero ? coeffs_.erase(it) : std::next(it);
            }
        }
        return *this;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& [beta, v] : coeffs_)
            for (int c = 0; c < ncomp_; ++c) m = std::max(m, scalar_traits<S>::abs_value(v(c)));
        return m;
    }

    long max_stored_degree() const {
        long m = 0;
        for (const auto& [beta, v] : coeffs_) m = std::max(m, beta.degree());
        return m;
    }

    TruncatedSeries truncated(long new_trunc) const {
        TruncatedSeries r(dim_, std::min(new_trunc, trunc_), ncomp_);
        for (const auto& [beta, v] : coeffs_)
            if (beta.degree() <= r.trunc_) r.coeffs_[beta] = v;
        return r;
    }

    /// Same coefficients under a raised truncation bound.
    TruncatedSeries with_trunc(long new_trunc) const {
        if (new_trunc < max_stored_degree()) return truncated(new_trunc);
        TruncatedSeries r = *this;
        r.trunc_ = new_trunc;
        return r;
    }

    TruncatedSeries component(int c) const {
        TruncatedSeries r(dim_, trunc_, 1);
        for (const auto& [beta, v] : coeffs_) {
            if (!scalar_traits<S>::is_zero(v(c)) || scalar_traits<S>::exact)
                r.coeffs_[beta] = Coeff::Constant(1, v(c));
        }
        return r;
    }

    /// Value at a point, all components.
    Coeff evaluate(const std::vector<S>& x) const {
        if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("evaluate: dimension mismatch");
        Coeff acc = Coeff::Constant(ncomp_, scalar_traits<S>::zero());
        for (const auto& [beta, v] : coeffs_) {
            S m = scalar_traits<S>::one();
            for (int j = 0; j < dim_; ++j)
                for (int p = 0; p < beta[j]; ++p) m *= x[j];
            acc += m * v;
        }
        return acc;
    }

    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
        if (a.dim_ != b.dim_ || a.ncomp_ != b.ncomp_) return false;
        auto covered = [&](const TruncatedSeries& p, const TruncatedSeries& q) {
            for (const auto& [beta, v] : p.coeffs_) {
                auto w = q.coeff(beta);
                for (int c = 0; c < p.ncomp_; ++c)
                    if (!scalar_traits<S>::is_zero(v(c) - w(c))) return false;
            }
            return true;
        };
        return covered(a, b) && covered(b, a);
    }

private:
    void check_key(const MultiIndex& beta) const {
        if (beta.dim() != dim_) throw std::invalid_argument("exponent dimension mismatch");
        if (beta.degree() > trunc_) throw std::domain_error("exponent exceeds truncation order");
    }

    int dim_;
    int ncomp_;
    long trunc_;
    Map coeffs_;
};

template <class S>
TruncatedSeries<S> add(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("add: dimension mismatch");
    if (a.ncomp() != b.ncomp()) throw std::invalid_argument("add: coefficient length mismatch");
    TruncatedSeries<S> r(a.dim(), std::min(a.trunc_order(), b.trunc_order()), a.ncomp());
    for (const auto& [beta, v] : a.terms())
        if (beta.degree() <= r.trunc_order()) r.add_to(beta, v);
    for (const auto& [beta, v] : b.terms())
        if (beta.degree() <= r.trunc_order()) r.add_to(beta, v);
    return r.normalize();
}

template <class S>
TruncatedSeries<S> scale(const TruncatedSeries<S>& a, const S& c) {
    TruncatedSeries<S> r(a.dim(), a.trunc_order(), a.ncomp());
    for (const auto& [beta, v] : a.terms()) r.add_to(beta, (c * v).eval());
    return r.normalize();
}

template <class S>
TruncatedSeries<S> sub(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    return add(a, scale(b, S(-1)));
}

/// Cauchy product truncated at min(T_a, T_b). Coefficients must be scalar,
/// or exactly one factor scalar and one vector-valued.
template <class S>
TruncatedSeries<S> mul(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("mul: dimension mismatch");
    if (a.ncomp() != 1 && b.ncomp() != 1)
        throw std::invalid_argument("mul: at least one factor must have scalar coefficients");
    const TruncatedSeries<S>& sc = (a.ncomp() == 1) ? a : b;
    const TruncatedSeries<S>& vec = (a.ncomp() == 1) ? b : a;
    TruncatedSeries<S> r(a.dim(), std::min(a.trunc_order(), b.trunc_order()), vec.ncomp());
    for (const auto& [bs, vs] : sc.terms()) {
        long ds = bs.degree();
        if (ds > r.trunc_order()) continue;
        for (const auto& [bv, vv] : vec.terms()) {
            if (ds + bv.degree() > r.trunc_order()) continue;
            r.add_to(bs + bv, (vs(0) * vv).eval());
        }
    }
    return r.normalize();
}

/// Product with the single monomial x^shift (no coefficient), truncated at T_a.
template <class S>
TruncatedSeries<S> mul_monomial(const TruncatedSeries<S>& a, const MultiIndex& shift) {
    TruncatedSeries<S> r(a.dim(), a.trunc_order(), a.ncomp());
    for (const auto& [beta, v] : a.terms()) {
        MultiIndex g = beta + shift;
        if (g.degree() <= r.trunc_order()) r.add_to(g, v);
    }
    return r;
}

/// Formal partial derivative d^beta/dx^beta; the truncation order drops by |beta|.
template <class S>
TruncatedSeries<S> derivative(const TruncatedSeries<S>& f, const MultiIndex& order) {
    if (order.dim() != f.dim()) throw std::invalid_argument("derivative: dimension mismatch");
    TruncatedSeries<S> r(f.dim(), std::max(0L, f.trunc_order() - order.degree()), f.ncomp());
    for (const auto& [beta, v] : f.terms()) {
        if (!order.leq(beta)) continue;
        S factor = scalar_traits<S>::one();
        MultiIndex g = beta;
        for (int j = 0; j < f.dim(); ++j)
            for (int p = 0; p < order[j]; ++p) factor *= S(beta[j] - p);
        g = beta - order;
        if (g.degree() <= r.trunc_order()) r.add_to(g, (factor * v).eval());
    }
    return r.normalize();
}

/// f composed with the blow-up chart pi_ij, which places x_i*x_j in slot j:
/// each monomial x^beta maps to x^beta * x_i^{beta_j}. Terms whose resulting
/// total degree exceeds the truncation order are dropped.
template <class S>
TruncatedSeries<S> substitute_blowup(const TruncatedSeries<S>& f, int i, int j) {
    if (i == j) throw std::invalid_argument("substitute_blowup: i and j must differ");
    if (i < 0 || j < 0 || i >= f.dim() || j >= f.dim())
        throw std::invalid_argument("substitute_blowup: index out of range");
    TruncatedSeries<S> r(f.dim(), f.trunc_order(), f.ncomp());
    for (const auto& [beta, v] : f.terms()) {
        MultiIndex g = beta;
        g[i] += beta[j];
        if (g.degree() <= r.trunc_order()) r.add_to(g, v);
    }
    return r;
}

/// The weighted Euler field scaled by the monomial: termwise
/// x^beta -> <beta,lambda> x^{beta + k*alpha_{J_s}}. Requires k*alpha_j
/// integral on the weighted variables.
template <class S>
TruncatedSeries<S> apply_vector_field(const TruncatedSeries<S>& f, const MonomialOrder& mo) {
    if (mo.dim() != f.dim()) throw std::invalid_argument("apply_vector_field: dimension mismatch");
    MultiIndex shift = mo.integer_shift();
    TruncatedSeries<S> r(f.dim(), f.trunc_order(), f.ncomp());
    for (const auto& [beta, v] : f.terms()) {
        Rational w = mo.pairing(beta);
        if (w == 0) continue;
        MultiIndex g = beta + shift;
        if (g.degree() <= r.trunc_order())
            r.add_to(g, (scalar_traits<S>::from_rational(w) * v).eval());
    }
    return r.normalize();
}

/// Ramified component: one summand of f = sum_{0 <= beta < alpha} x^beta
/// f_beta(x_1^{alpha_1}, ..., x_d^{alpha_d}), as a series in z_j = x_j^{alpha_j}.
template <class S>
struct RamifiedComponent {
    MultiIndex beta;
    TruncatedSeries<S> series;
};

template <class S>
std::vector<RamifiedComponent<S>> ramify(const TruncatedSeries<S>& f, const MultiIndex& alpha) {
    if (alpha.dim() != f.dim()) throw std::invalid_argument("ramify: dimension mismatch");
    if (!alpha.all_positive()) throw std::invalid_argument("ramify: alpha entries must be >= 1");
    const int d = f.dim();
    std::map<MultiIndex, TruncatedSeries<S>> buckets;
    for (const auto& [gamma, v] : f.terms()) {
        MultiIndex rem(d), quo(d);
        for (int j = 0; j < d; ++j) {
            quo[j] = gamma[j] / alpha[j];
            rem[j] = gamma[j] % alpha[j];
        }
        auto it = buckets.find(rem);
        if (it == buckets.end())
            it = buckets.emplace(rem, TruncatedSeries<S>(d, f.trunc_order(), f.ncomp())).first;
        it->second.add_to(quo, v);
    }
    std::vector<RamifiedComponent<S>> out;
    out.reserve(buckets.size());
    for (auto& [beta, series] : buckets) out.push_back({beta, std::move(series.normalize())});
    return out;
}

/// Inverse of ramify: sum_{beta} x^beta f_beta(x^alpha), exact on the support.
template <class S>
TruncatedSeries<S> reassemble_ramified(const std::vector<RamifiedComponent<S>>& parts,
                                       const MultiIndex& alpha, int dim, long trunc, int ncomp) {
    TruncatedSeries<S> r(dim, trunc, ncomp);
    for (const auto& part : parts) {
        for (const auto& [quo, v] : part.series.terms()) {
            MultiIndex gamma = part.beta;
            for (int j = 0; j < dim; ++j) gamma[j] += quo[j] * alpha[j];
            if (gamma.degree() <= trunc) r.add_to(gamma, v);
        }
    }
    return r.normalize();
}

}  // namespace monosum
