#pragma once

#include <utility>
#include <vector>

#include "monosum/analysis.hpp"
#include "monosum/gamma.hpp"
#include "monosum/series.hpp"

namespace monosum {

/// A series in the Borel plane. The represented object is xi^offset * body,
/// where the body is an ordinary truncated series with integer exponents and
/// the offset equals -k*alpha_j on the weighted variables and 0 elsewhere.
/// The body coefficient at beta is therefore the coefficient of
/// xi^{beta+offset} of the represented object.
template <class S>
struct BorelSeries {
    TruncatedSeries<S> body;
    std::vector<Rational> offset;
    MonomialOrder mo;

    BorelSeries(TruncatedSeries<S> b, const MonomialOrder& m)
        : body(std::move(b)), offset(canonical_offset(m)), mo(m) {}
    BorelSeries(TruncatedSeries<S> b, std::vector<Rational> o, const MonomialOrder& m)
        : body(std::move(b)), offset(std::move(o)), mo(m) {}

    static std::vector<Rational> canonical_offset(const MonomialOrder& m) {
        std::vector<Rational> o(m.dim(), Rational(0));
        for (int j : m.weighted_indices()) o[j] = -m.threshold(j);
        return o;
    }

    /// <beta + offset, lambda> of a body exponent; for the canonical offset
    /// this is <beta,lambda> - 1.
    Rational represented_pairing(const MultiIndex& beta) const {
        Rational r = mo.pairing(beta);
        for (int j : mo.weighted_indices()) r += offset[j] * mo.lambda()[j];
        return r;
    }
};

/// Splits f into (head, tail): the head collects the terms whose weighted
/// exponents fall below k*alpha (they stay untransformed as a convergent
/// summand), the tail is Borel-transformable with <mu,lambda> >= 1 on its
/// whole support. Thresholds are compared as exact rationals, so fractional
/// k*alpha_j are handled.
template <class S>
std::pair<TruncatedSeries<S>, TruncatedSeries<S>> split_summand(const TruncatedSeries<S>& f,
                                                                const MonomialOrder& mo) {
    if (mo.dim() != f.dim()) throw std::invalid_argument("split_summand: dimension mismatch");
    TruncatedSeries<S> head(f.dim(), f.trunc_order(), f.ncomp());
    TruncatedSeries<S> tail(f.dim(), f.trunc_order(), f.ncomp());
    for (const auto& [beta, v] : f.terms()) {
        bool below = false;
        for (int j : mo.weighted_indices())
            if (Rational(beta[j]) < mo.threshold(j)) {
                below = true;
                break;
            }
        (below ? head : tail).add_to(beta, v);
    }
    return {std::move(head), std::move(tail)};
}

/// Formal monomial Borel transform: termwise a_mu x^mu -> a_mu/Gamma(<mu,lambda>)
/// at body exponent mu, with the exponent shift -k*alpha carried by the offset.
/// Every term must satisfy <mu,lambda> > 0; run split_summand first.
namespace detail_borel {
template <class S>
bool all_zero(const Eigen::Matrix<S, Eigen::Dynamic, 1>& v) {
    for (int c = 0; c < v.size(); ++c)
        if (!scalar_traits<S>::is_zero(v(c))) return false;
    return true;
}
}  // namespace detail_borel

template <class S>
BorelSeries<S> formal_borel(const TruncatedSeries<S>& f, const MonomialOrder& mo) {
    if (mo.dim() != f.dim()) throw std::invalid_argument("formal_borel: dimension mismatch");
    TruncatedSeries<S> body(f.dim(), f.trunc_order(), f.ncomp());
    for (const auto& [mu, v] : f.terms()) {
        if (detail_borel::all_zero<S>(v)) continue;  // stored zeros are absent terms
        Rational arg = mo.pairing(mu);
        if (arg <= 0)
            throw std::domain_error("formal_borel: term with <mu,lambda> <= 0 (kernel pole); split first");
        S g = gamma_of<S>(arg);
        body.add_to(mu, (v / g).eval());
    }
    return BorelSeries<S>(std::move(body.normalize()), mo);
}

/// Formal monomial Laplace transform, the exact inverse of formal_borel:
/// termwise multiplication by Gamma(<mu,lambda>) plus the +k*alpha shift that
/// cancels the offset. Requires the canonical offset (an exponent would
/// otherwise leave N^d) and <mu,lambda> > 0 on the support.
template <class S>
TruncatedSeries<S> formal_laplace(const BorelSeries<S>& g) {
    if (g.offset != BorelSeries<S>::canonical_offset(g.mo))
        throw std::domain_error("formal_laplace: non-canonical offset leaves the exponent grid");
    TruncatedSeries<S> f(g.body.dim(), g.body.trunc_order(), g.body.ncomp());
    for (const auto& [mu, v] : g.body.terms()) {
        if (detail_borel::all_zero<S>(v)) continue;
        Rational arg = g.mo.pairing(mu);
        if (arg <= 0) throw std::domain_error("formal_laplace: term with <mu,lambda> <= 0");
        S ga = gamma_of<S>(arg);
        f.add_to(mu, (ga * v).eval());
    }
    return f.normalize();
}

/// Monomial convolution, the Borel-plane image of multiplication. On body
/// monomials with the canonical offset the Beta identity collapses to
///   (a, F) * (b, G) -> F G Gamma(<a,l>) Gamma(<b,l>) / Gamma(<a+b,l>) at a+b,
/// and the offset reproduces itself. Bilinear extension, truncated at the
/// smaller carrier order.
template <class S>
BorelSeries<S> convolve(const BorelSeries<S>& f, const BorelSeries<S>& g) {
    if (f.mo != g.mo || f.offset != g.offset) throw std::invalid_argument("convolve: monomial order mismatch");
    if (f.body.ncomp() != 1 && g.body.ncomp() != 1)
        throw std::invalid_argument("convolve: at least one factor must have scalar coefficients");
    const auto& mo = f.mo;
    // represented exponents add plus k*alpha; relative to the shared offset
    // the body shifts by offset + k*alpha (zero for the canonical offset)
    MultiIndex body_shift(mo.dim());
    for (int j : mo.weighted_indices()) {
        Rational sh = f.offset[j] + mo.threshold(j);
        if (!is_integer(sh) || sh < 0)
            throw std::domain_error("convolve: offset + k*alpha leaves the exponent grid");
        body_shift[j] = static_cast<int>(sh.get_num().get_si());
    }
    long trunc = std::min(f.body.trunc_order(), g.body.trunc_order());
    TruncatedSeries<S> body(f.body.dim(), trunc, std::max(f.body.ncomp(), g.body.ncomp()));
    const bool f_scalar = f.body.ncomp() == 1;
    const auto& sc = f_scalar ? f.body : g.body;
    const auto& vec = f_scalar ? g.body : f.body;
    for (const auto& [a, va] : sc.terms()) {
        if (scalar_traits<S>::is_zero(va(0))) continue;
        Rational pa = f.represented_pairing(a) + 1;
        if (pa <= 0) throw std::domain_error("convolve: nonpositive Gamma argument");
        S ga = gamma_of<S>(pa);
        for (const auto& [b, vb] : vec.terms()) {
            if (detail_borel::all_zero<S>(vb)) continue;
            MultiIndex c = a + b + body_shift;
            if (c.degree() > trunc) continue;
            Rational pb = g.represented_pairing(b) + 1;
            if (pb <= 0) throw std::domain_error("convolve: nonpositive Gamma argument");
            Rational pc = pa + pb;
            S factor = ga * gamma_of<S>(pb) / gamma_of<S>(pc);
            body.add_to(c, (va(0) * factor * vb).eval());
        }
    }
    return BorelSeries<S>(std::move(body.normalize()), f.offset, mo);
}

/// Multiplication of the represented object by xi^{k*alpha_{J_s}}: a body
/// shift by the integral threshold exponents, offset unchanged.
template <class S>
BorelSeries<S> mul_xi_kalpha(const BorelSeries<S>& g) {
    return BorelSeries<S>(mul_monomial(g.body, g.mo.integer_shift()), g.offset, g.mo);
}

/// Multiplication of the represented object by a series supported on inert
/// variables only (e.g. a pure-eta series in the convolution equation); this
/// commutes with the Borel transform.
template <class S>
BorelSeries<S> mul_inert(const BorelSeries<S>& g, const TruncatedSeries<S>& h) {
    for (const auto& [beta, v] : h.terms())
        for (int j : g.mo.weighted_indices())
            if (beta[j] != 0) throw std::invalid_argument("mul_inert: factor touches weighted variables");
    return BorelSeries<S>(mul(h, g.body), g.offset, g.mo);
}

template <class S>
BorelSeries<S> add(const BorelSeries<S>& f, const BorelSeries<S>& g) {
    if (f.mo != g.mo || f.offset != g.offset) throw std::invalid_argument("add: Borel frame mismatch");
    return BorelSeries<S>(add(f.body, g.body), f.offset, f.mo);
}

template <class S>
BorelSeries<S> sub(const BorelSeries<S>& f, const BorelSeries<S>& g) {
    if (f.mo != g.mo || f.offset != g.offset) throw std::invalid_argument("sub: Borel frame mismatch");
    return BorelSeries<S>(sub(f.body, g.body), f.offset, f.mo);
}

/// The blow-up pi_ij applied to the represented object: the body transforms
/// like an ordinary series and the offset entry at i picks up the one at j.
template <class S>
BorelSeries<S> substitute_blowup(const BorelSeries<S>& g, int i, int j, const MonomialOrder& new_mo) {
    std::vector<Rational> o = g.offset;
    o[i] += o[j];
    return BorelSeries<S>(substitute_blowup(g.body, i, j), std::move(o), new_mo);
}

/// Weight transport for the blow-up commutation identity: blowing up after
/// transforming with (alpha, k, s) matches transforming f o pi_ij with
/// (alpha + alpha_j e_i, k, s'), where s' moves the weight
/// (alpha_j/alpha_i) s_i from slot j to slot i. Requires the admissibility
/// condition s_j alpha_i >= s_i alpha_j, which keeps s' on the simplex.
inline MonomialOrder blowup_pushed_order(const MonomialOrder& mo, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= mo.dim() || j >= mo.dim())
        throw std::invalid_argument("blowup_pushed_order: bad chart indices");
    const auto& s = mo.weights();
    const auto& alpha = mo.alpha();
    if (s[j] * Rational(alpha[i]) < s[i] * Rational(alpha[j]))
        throw std::domain_error("blowup_pushed_order: admissibility s_j alpha_i >= s_i alpha_j violated");
    std::vector<Rational> sp = s;
    Rational moved = Rational(alpha[j]) / Rational(alpha[i]) * s[i];
    sp[i] += moved;
    sp[j] -= moved;
    MultiIndex ap = alpha;
    ap[i] += alpha[j];
    return MonomialOrder(ap, mo.k(), sp);
}

/// Computes both routes of the Borel blow-up identity on the truncated
/// support and returns the largest coefficient discrepancy between the
/// transformed bodies (exact arithmetic gives 0). When a weight vanishes in
/// the pushed frame (the admissibility boundary, or an inert i paired with a
/// weighted j) the pushed transform keeps that variable unshifted; the bodies
/// still agree termwise and the known offset gap of -k*alpha_j at that slot
/// is reconciled rather than flagged.
template <class S>
double borel_blowup_commute_check(const TruncatedSeries<S>& f, const MonomialOrder& mo, int i, int j) {
    MonomialOrder pushed = blowup_pushed_order(mo, i, j);

    BorelSeries<S> lhs = substitute_blowup(formal_borel(f, mo), i, j, pushed);
    BorelSeries<S> rhs = formal_borel(substitute_blowup(f, i, j), pushed);

    const Rational kaj = mo.k() * Rational(mo.alpha()[j]);
    for (int l = 0; l < mo.dim(); ++l) {
        Rational gap = lhs.offset[l] - rhs.offset[l];
        if (gap == 0) continue;
        bool j_boundary = (l == j) && mo.is_weighted(j) && !pushed.is_weighted(j) && gap == -kaj;
        bool i_inert = (l == i) && !mo.is_weighted(i) && mo.is_weighted(j) && gap == -kaj;
        if (!j_boundary && !i_inert)
            throw std::domain_error("borel_blowup_commute_check: unexpected offset mismatch");
    }
    return sub(lhs.body, rhs.body).max_abs();
}

}  // namespace monosum
