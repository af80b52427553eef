#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "monosum/borel.hpp"
#include "monosum/errors.hpp"
#include "monosum/series.hpp"

namespace monosum {

template <class S> using DenseMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S> using DenseVec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// One entry of the polynomial table of G(x, eps, y): the contribution
/// coef * x^bx * eps^be * y^I, with coef a C^N vector stored exactly.
struct GTerm {
    MultiIndex x;
    MultiIndex eps;
    std::vector<int> ypow;
    std::vector<RatC> coef;
};

/// The singularly perturbed problem
///   x^alpha eps^alpha' (mu_1 x_1 d/dx_1 + ... + mu_n x_n d/dx_n) y = G(x,eps,y)
/// with y in C^N, G polynomial, G(0,0,0) = 0 and dG/dy(0,0,0) invertible.
class PdeProblem {
public:
    int n = 1, m = 1, N = 1;
    MultiIndex alpha, alpha_prime;
    std::vector<Rational> mu;
    std::vector<GTerm> terms;

    int joint_dim() const { return n + m; }

    Rational kappa() const {
        Rational k(0);
        for (int j = 0; j < n; ++j) k += mu[j] * Rational(alpha[j]);
        return k;
    }

    /// Normalized weights s_j = mu_j alpha_j / <mu,alpha> on the x block,
    /// zero on the eps block.
    std::vector<Rational> joint_weights() const {
        std::vector<Rational> s(joint_dim(), Rational(0));
        Rational k = kappa();
        for (int j = 0; j < n; ++j) s[j] = mu[j] * Rational(alpha[j]) / k;
        return s;
    }

    /// Monomial order of the joint Borel transform B_(lambda,0): level 1 in
    /// the monomial x^alpha eps^alpha', weights zero on eps.
    MonomialOrder joint_order() const {
        MultiIndex a(joint_dim());
        for (int j = 0; j < n; ++j) a[j] = alpha[j];
        for (int j = 0; j < m; ++j) a[n + j] = alpha_prime[j];
        return MonomialOrder(a, Rational(1), joint_weights());
    }

    MultiIndex joint_exponent(const MultiIndex& bx, const MultiIndex& be) const {
        MultiIndex g(joint_dim());
        for (int j = 0; j < n; ++j) g[j] = bx[j];
        for (int j = 0; j < m; ++j) g[n + j] = be[j];
        return g;
    }

    template <class S>
    DenseMat<S> b0() const {
        DenseMat<S> B = DenseMat<S>::Constant(N, N, scalar_traits<S>::zero());
        for (const auto& t : terms) {
            if (!t.x.is_zero() || !t.eps.is_zero()) continue;
            int deg = 0, col = -1;
            for (int c = 0; c < N; ++c) {
                deg += t.ypow[c];
                if (t.ypow[c] == 1) col = c;
            }
            if (deg != 1) continue;
            for (int r = 0; r < N; ++r) B(r, col) += scalar_traits<S>::from_ratc(t.coef[r]);
        }
        return B;
    }

    /// Condition number of B0 (largest/smallest singular value).
    double b0_condition() const {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b0<Cplx>());
        double smin = svd.singularValues()(N - 1), smax = svd.singularValues()(0);
        return smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
    }

    void validate() const {
        if (n < 1 || m < 1 || N < 1) throw ParseError("problem: n, m, N must be >= 1");
        if (alpha.dim() != n || alpha_prime.dim() != m) throw ParseError("problem: alpha shape mismatch");
        if (!alpha.all_positive() || !alpha_prime.all_positive())
            throw ParseError("problem: alpha entries must be positive integers");
        if (static_cast<int>(mu.size()) != n) throw ParseError("problem: mu shape mismatch");
        for (const auto& w : mu)
            if (w <= 0) throw ParseError("problem: mu entries must be positive");
        for (const auto& t : terms) {
            if (t.x.dim() != n || t.eps.dim() != m || static_cast<int>(t.ypow.size()) != N ||
                static_cast<int>(t.coef.size()) != N)
                throw ParseError("problem: term shape mismatch");
            bool origin = t.x.is_zero() && t.eps.is_zero();
            int ydeg = 0;
            for (int p : t.ypow) {
                if (p < 0) throw ParseError("problem: negative power of y");
                ydeg += p;
            }
            if (origin && ydeg == 0)
                for (const auto& c : t.coef)
                    if (!c.is_zero()) throw PreconditionError("problem: G(0,0,0) must vanish");
        }
        Eigen::MatrixXcd B = b0<Cplx>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
        double smin = svd.singularValues()(N - 1), smax = svd.singularValues()(0);
        if (!(smin > 1e-14 * std::max(1.0, smax)))
            throw PreconditionError("problem: B0 = dG/dy(0,0,0) is singular");
    }
};

namespace detail {

inline long xdeg(const MultiIndex& beta, int n) {
    long d = 0;
    for (int j = 0; j < n; ++j) d += beta[j];
    return d;
}
inline long edeg(const MultiIndex& beta, int n) { return beta.degree() - xdeg(beta, n); }

/// Restrict a joint series to the box {x-degree <= tx, eps-degree <= te}.
template <class S>
TruncatedSeries<S> box_truncate(const TruncatedSeries<S>& f, int n, long tx, long te) {
    TruncatedSeries<S> r(f.dim(), f.trunc_order(), f.ncomp());
    for (const auto& [beta, v] : f.terms())
        if (xdeg(beta, n) <= tx && edeg(beta, n) <= te) r.add_to(beta, v);
    return r;
}

template <class S>
DenseVec<S> solve_dense(const DenseMat<S>& A, const DenseVec<S>& b);

template <>
inline DenseVec<Cplx> solve_dense(const DenseMat<Cplx>& A, const DenseVec<Cplx>& b) {
    return A.partialPivLu().solve(b);
}

template <>
inline DenseVec<RatC> solve_dense(const DenseMat<RatC>& A, const DenseVec<RatC>& b) {
    const int N = static_cast<int>(A.rows());
    DenseMat<RatC> M = A;
    DenseVec<RatC> x = b;
    for (int col = 0; col < N; ++col) {
        int piv = -1;
        for (int r = col; r < N; ++r)
            if (!M(r, col).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw PreconditionError("exact solve: singular matrix");
        if (piv != col) {
            M.row(piv).swap(M.row(col));
            std::swap(x(piv), x(col));
        }
        for (int r = col + 1; r < N; ++r) {
            if (M(r, col).is_zero()) continue;
            RatC f = M(r, col) / M(col, col);
            for (int c = col; c < N; ++c) M(r, c) -= f * M(col, c);
            x(r) -= f * x(col);
        }
    }
    for (int r = N - 1; r >= 0; --r) {
        RatC acc = x(r);
        for (int c = r + 1; c < N; ++c) acc -= M(r, c) * x(c);
        x(r) = acc / M(r, r);
    }
    return x;
}

/// N x N matrix with truncated-series entries, stored per joint exponent.
template <class S>
struct MatrixSeries {
    int dim = 0;
    long trunc = 0;
    int size = 0;
    std::map<MultiIndex, DenseMat<S>> terms;

    MatrixSeries() = default;
    MatrixSeries(int d, long t, int N) : dim(d), trunc(t), size(N) {}

    void add_to(const MultiIndex& beta, const DenseMat<S>& M) {
        if (beta.degree() > trunc) return;
        auto it = terms.find(beta);
        if (it == terms.end())
            terms.emplace(beta, M);
        else
            it->second += M;
    }

    /// Part supported at x-degree zero (pure-eps entries).
    MatrixSeries x0_part(int n) const {
        MatrixSeries r(dim, trunc, size);
        for (const auto& [beta, M] : terms)
            if (xdeg(beta, n) == 0) r.terms.emplace(beta, M);
        return r;
    }

    MatrixSeries constant_shifted() const {  // subtract the exponent-zero matrix
        MatrixSeries r = *this;
        r.terms.erase(MultiIndex(dim));
        return r;
    }

    DenseMat<S> at_origin() const {
        auto it = terms.find(MultiIndex(dim));
        if (it != terms.end()) return it->second;
        return DenseMat<S>::Constant(size, size, scalar_traits<S>::zero());
    }

    TruncatedSeries<S> apply(const TruncatedSeries<S>& y) const {
        TruncatedSeries<S> r(dim, std::min(trunc, y.trunc_order()), size);
        for (const auto& [bm, M] : terms) {
            if (bm.degree() > r.trunc_order()) continue;
            for (const auto& [by, v] : y.terms()) {
                MultiIndex g = bm + by;
                if (g.degree() <= r.trunc_order()) r.add_to(g, (M * v).eval());
            }
        }
        return r.normalize();
    }

    TruncatedSeries<S> entry(int r, int c) const {
        TruncatedSeries<S> out(dim, trunc, 1);
        for (const auto& [beta, M] : terms)
            if (!scalar_traits<S>::is_zero(M(r, c)) || scalar_traits<S>::exact)
                out.add_to(beta, DenseVec<S>::Constant(1, M(r, c)));
        return out.normalize();
    }
};

/// The normalized right side F = G/<mu,alpha> split into its constant,
/// linear and higher-order parts in y, each carried on the joint grid.
template <class S>
struct NormalizedRhs {
    Rational kappa;
    TruncatedSeries<S> c;                               // F(x,eps,0), C^N valued
    MatrixSeries<S> A;                                  // dF/dy as a matrix series
    std::map<std::vector<int>, TruncatedSeries<S>> nl;  // |I| >= 2 buckets, C^N valued
    DenseMat<S> A0;                                     // A at the origin
};

template <class S>
NormalizedRhs<S> normalized_rhs(const PdeProblem& p, long trunc) {
    const int d = p.joint_dim();
    NormalizedRhs<S> out;
    out.kappa = p.kappa();
    out.c = TruncatedSeries<S>(d, trunc, p.N);
    out.A = MatrixSeries<S>(d, trunc, p.N);
    const S inv_kappa = scalar_traits<S>::from_rational(Rational(1) / out.kappa);
    for (const auto& t : p.terms) {
        MultiIndex g = p.joint_exponent(t.x, t.eps);
        if (g.degree() > trunc) continue;
        DenseVec<S> v(p.N);
        for (int r = 0; r < p.N; ++r) v(r) = inv_kappa * scalar_traits<S>::from_ratc(t.coef[r]);
        int ydeg = 0, col = -1;
        for (int c2 = 0; c2 < p.N; ++c2) {
            ydeg += t.ypow[c2];
            if (t.ypow[c2] >= 1) col = c2;
        }
        if (ydeg == 0) {
            out.c.add_to(g, v);
        } else if (ydeg == 1) {
            DenseMat<S> M = DenseMat<S>::Constant(p.N, p.N, scalar_traits<S>::zero());
            M.col(col) = v;
            out.A.add_to(g, M);
        } else {
            auto it = out.nl.find(t.ypow);
            if (it == out.nl.end())
                it = out.nl.emplace(t.ypow, TruncatedSeries<S>(d, trunc, p.N)).first;
            it->second.add_to(g, v);
        }
    }
    out.c.normalize();
    out.A0 = out.A.at_origin();
    return out;
}

/// Memoized monomial powers prod_c y_c^{I_c} of a vector-valued series.
template <class S>
class PowerCache {
public:
    PowerCache(const TruncatedSeries<S>& y, long trunc) : trunc_(trunc) {
        for (int c = 0; c < y.ncomp(); ++c) comps_.push_back(y.component(c).truncated(trunc));
    }

    const TruncatedSeries<S>& power(const std::vector<int>& I) {
        auto it = memo_.find(I);
        if (it != memo_.end()) return it->second;
        TruncatedSeries<S> acc = TruncatedSeries<S>::constant(comps_[0].dim(), trunc_,
                                                              scalar_traits<S>::one());
        for (size_t c = 0; c < I.size(); ++c)
            for (int rep = 0; rep < I[c]; ++rep) acc = mul(acc, comps_[c]);
        return memo_.emplace(I, std::move(acc)).first->second;
    }

private:
    long trunc_;
    std::vector<TruncatedSeries<S>> comps_;
    std::map<std::vector<int>, TruncatedSeries<S>> memo_;
};

/// F(x,eps,y) for a concrete series y, including the nonlinear buckets.
template <class S>
TruncatedSeries<S> eval_rhs(const NormalizedRhs<S>& F, const TruncatedSeries<S>& y, int n, long tx,
                            long te) {
    auto acc = box_truncate(add(F.c, F.A.apply(y)), n, tx, te);
    if (!F.nl.empty()) {
        PowerCache<S> cache(y, acc.trunc_order());
        for (const auto& [I, coef] : F.nl)
            acc = add(acc, box_truncate(mul(coef, cache.power(I)), n, tx, te));
    }
    return acc;
}

/// Order-by-order solve of M(eps) u = rhs over the eps grid, where M has an
/// invertible constant part. Both series live on the joint grid with all
/// x-exponents zero; the result is resolved to eps-degree te.
template <class S>
TruncatedSeries<S> series_linear_solve(const MatrixSeries<S>& M, const TruncatedSeries<S>& rhs, int n,
                                       long te) {
    const int d = M.dim;
    DenseMat<S> M0 = M.at_origin();
    TruncatedSeries<S> u(d, rhs.trunc_order(), M.size);
    // graded list of eps exponents that can carry a nonzero coefficient:
    // the rhs support closed under addition of M's nonconstant exponents
    std::map<MultiIndex, DenseVec<S>> pending;
    for (const auto& [beta, v] : rhs.terms())
        if (edeg(beta, n) <= te) pending.emplace(beta, v);
    std::vector<MultiIndex> grid;
    {
        std::map<MultiIndex, bool> seen;
        for (const auto& [beta, v] : pending) seen[beta] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& [bm, mm] : M.terms) {
                if (bm.degree() == 0) continue;
                std::vector<MultiIndex> fresh;
                for (const auto& [bs, flag] : seen) {
                    MultiIndex g = bm + bs;
                    if (g.degree() <= rhs.trunc_order() && edeg(g, n) <= te && !seen.count(g))
                        fresh.push_back(g);
                }
                for (auto& g : fresh) {
                    seen[g] = true;
                    grew = true;
                }
            }
        }
        for (const auto& [beta, flag] : seen) grid.push_back(beta);
        std::sort(grid.begin(), grid.end(), [](const MultiIndex& a, const MultiIndex& b) {
            if (a.degree() != b.degree()) return a.degree() < b.degree();
            return a < b;
        });
    }
    for (const MultiIndex& delta : grid) {
        DenseVec<S> acc = DenseVec<S>::Constant(M.size, scalar_traits<S>::zero());
        auto it = pending.find(delta);
        if (it != pending.end()) acc = it->second;
        for (const auto& [bm, mm] : M.terms) {
            if (bm.degree() == 0 || !bm.leq(delta)) continue;
            MultiIndex lower = delta - bm;
            auto lu = u.terms().find(lower);
            if (lu != u.terms().end()) acc -= mm * lu->second;
        }
        DenseVec<S> sol = solve_dense<S>(M0, acc);
        bool nonzero = scalar_traits<S>::exact;
        for (int c = 0; c < M.size && !nonzero; ++c)
            if (!scalar_traits<S>::is_zero(sol(c))) nonzero = true;
        if (nonzero) u.add_to(delta, sol);
    }
    return u;
}

/// Jacobian dF/dy(0, eps, y) restricted to x-degree zero, as a matrix series.
template <class S>
MatrixSeries<S> jacobian_x0(const NormalizedRhs<S>& F, const TruncatedSeries<S>& y, int n, long te) {
    const int N = F.A.size;
    MatrixSeries<S> J = F.A.x0_part(n);
    if (!F.nl.empty()) {
        PowerCache<S> cache(y, J.trunc);
        for (const auto& [I, coef] : F.nl) {
            for (int c = 0; c < N; ++c) {
                if (I[c] == 0) continue;
                std::vector<int> Im = I;
                --Im[c];
                auto partial = box_truncate(cache.power(Im), n, 0, te);
                const S mult = scalar_traits<S>::from_rational(Rational(I[c]));
                for (const auto& [bc, vc] : coef.terms()) {
                    if (xdeg(bc, n) != 0) continue;
                    for (const auto& [bp, vp] : partial.terms()) {
                        MultiIndex g = bc + bp;
                        if (g.degree() > J.trunc || edeg(g, n) > te) continue;
                        DenseMat<S> M = DenseMat<S>::Constant(N, N, scalar_traits<S>::zero());
                        M.col(c) = (mult * vp(0) * vc).eval();
                        J.add_to(g, M);
                    }
                }
            }
        }
    }
    return J;
}

}  // namespace detail

/// The normalized right side F = G/<mu,alpha> with its constant, linear and
/// higher-order parts split out (A0 is the normalized Jacobian B0/<mu,alpha>).
/// The weights and lambda live on the problem: joint_weights(), joint_order().
template <class S>
detail::NormalizedRhs<S> normalize(const PdeProblem& p, long trunc) {
    p.validate();
    return detail::normalized_rhs<S>(p, trunc);
}

/// Unique solution y0(eps) of F(0, eps, y0) = 0 with y0(0) = 0, by Newton
/// iteration on truncated eps-series. Returned on the joint grid with all
/// x-exponents zero, resolved to eps-degree order.
template <class S>
TruncatedSeries<S> solve_y0(const PdeProblem& p, long order) {
    p.validate();
    const int d = p.joint_dim();
    auto F = detail::normalized_rhs<S>(p, order);
    int max_ydeg = 1;
    for (const auto& [I, coef] : F.nl) {
        int deg = 0;
        for (int v : I) deg += v;
        max_ydeg = std::max(max_ydeg, deg);
    }
    TruncatedSeries<S> y(d, order, p.N);
    auto converged = [&](const TruncatedSeries<S>& resid) {
        if (resid.max_abs() == 0.0) return true;
        if constexpr (scalar_traits<S>::exact) return false;
        double scale = std::pow(1.0 + y.max_abs(), max_ydeg);
        return resid.max_abs() <= 1e-12 * scale;
    };
    const int max_iter = 4 + static_cast<int>(std::ceil(std::log2(static_cast<double>(order) + 2)));
    for (int iter = 0; iter < max_iter; ++iter) {
        auto resid = detail::box_truncate(detail::eval_rhs(F, y, p.n, 0, order), p.n, 0, order);
        if (converged(resid)) return y;
        auto J = detail::jacobian_x0(F, y, p.n, order);
        auto delta = detail::series_linear_solve(J, resid, p.n, order);
        y = detail::box_truncate(sub(y, delta), p.n, 0, order);
    }
    auto resid = detail::box_truncate(detail::eval_rhs(F, y, p.n, 0, order), p.n, 0, order);
    if (converged(resid)) return y;
    throw ConvergenceError("solve_y0: Newton iteration failed to converge");
}

/// The unique formal power series solution, with x-degrees resolved through
/// x_order and every x-coefficient carried as an eps-series to eps_order.
template <class S>
struct FormalSolution {
    TruncatedSeries<S> series;
    long x_order = 0;
    long eps_order = 0;
};

template <class S>
FormalSolution<S> formal_solve(const PdeProblem& p, long x_order, long eps_order = -1) {
    p.validate();
    if (eps_order < 0) eps_order = x_order;
    const int d = p.joint_dim();
    const long trunc = x_order + eps_order;
    auto F = detail::normalized_rhs<S>(p, trunc);
    const auto mo = p.joint_order();
    const MultiIndex eps_shift = p.joint_exponent(MultiIndex(p.n), p.alpha_prime);

    TruncatedSeries<S> y = solve_y0<S>(p, eps_order).with_trunc(trunc);

    // M(eps) multiplies the unknown shell coefficient: A(0,eps) plus the
    // nonlinear Jacobian at y0 (products with >= 2 factors keep it
    // invertible at eps = 0 since y0(0) = 0).
    auto M = detail::jacobian_x0(F, y, p.n, eps_order);

    for (long D = 1; D <= x_order; ++D) {
        auto rhs_eval = detail::eval_rhs(F, y, p.n, x_order, eps_order);
        auto lhs_eval = mul_monomial(apply_vector_field(y, mo), eps_shift);
        auto resid = sub(rhs_eval, lhs_eval).normalize();
        // group shell-D terms by their x-exponent
        std::map<MultiIndex, TruncatedSeries<S>> shell;
        for (const auto& [beta, v] : resid.terms()) {
            if (detail::xdeg(beta, p.n) != D || detail::edeg(beta, p.n) > eps_order) continue;
            MultiIndex gx(d), ge(d);
            for (int j = 0; j < p.n; ++j) gx[j] = beta[j];
            for (int j = p.n; j < d; ++j) ge[j] = beta[j];
            auto it = shell.find(gx);
            if (it == shell.end()) it = shell.emplace(gx, TruncatedSeries<S>(d, trunc, p.N)).first;
            it->second.add_to(ge, v);
        }
        for (auto& [gx, r] : shell) {
            // the shell equation reads M(eps) y_gx = -residual_gx
            auto ycoef = detail::series_linear_solve(
                M, scale(r, scalar_traits<S>::from_rational(-1)), p.n, eps_order);
            for (const auto& [ge, v] : ycoef.terms()) y.add_to(gx + ge, v);
        }
    }
    return {y.normalize(), x_order, eps_order};
}

/// Residual of substituting the formal solution into the equation,
/// eps^alpha' X_lambda(y) - F(x,eps,y). Coefficients inside the resolved box
/// vanish exactly; the caller reads the maximum over that box.
template <class S>
double pde_residual_max(const PdeProblem& p, const FormalSolution<S>& sol) {
    const long trunc = sol.series.trunc_order();
    auto F = detail::normalized_rhs<S>(p, trunc);
    const auto mo = p.joint_order();
    const MultiIndex eps_shift = p.joint_exponent(MultiIndex(p.n), p.alpha_prime);
    auto resid = sub(mul_monomial(apply_vector_field(sol.series, mo), eps_shift),
                     detail::eval_rhs(F, sol.series, p.n, sol.x_order, sol.eps_order));
    const long tx = sol.x_order - p.alpha.degree();
    const long te = sol.eps_order - p.alpha_prime.degree();
    double worst = 0.0;
    for (const auto& [beta, v] : resid.terms()) {
        if (detail::xdeg(beta, p.n) > tx || detail::edeg(beta, p.n) > te) continue;
        for (int c = 0; c < resid.ncomp(); ++c)
            worst = std::max(worst, scalar_traits<S>::abs_value(v(c)));
    }
    return worst;
}

struct SingularDirectionSet {
    Eigen::VectorXcd eigenvalues;
    std::vector<double> directions;  // sorted, in [0, 2pi)
};

/// Possible singular directions: arguments of the eigenvalues of
/// B0/<mu,alpha>, deduplicated within 1e-10 radians.
inline SingularDirectionSet singular_directions(const PdeProblem& p) {
    p.validate();
    Eigen::MatrixXcd B = p.b0<Cplx>();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(B, false);
    SingularDirectionSet out;
    out.eigenvalues = es.eigenvalues();
    const double scale = B.norm();
    const double kappa = to_double(p.kappa());
    std::vector<double> dirs;
    for (int j = 0; j < out.eigenvalues.size(); ++j) {
        Cplx nu = out.eigenvalues(j);
        if (std::abs(nu) <= 1e-12 * scale)
            throw PreconditionError("singular_directions: eigenvalue at zero");
        double th = std::arg(nu / kappa);
        if (th < 0) th += 2 * M_PI;
        if (th >= 2 * M_PI) th -= 2 * M_PI;
        dirs.push_back(th);
    }
    std::sort(dirs.begin(), dirs.end());
    for (double th : dirs) {
        if (!out.directions.empty() && th - out.directions.back() < 1e-10) continue;
        out.directions.push_back(th);
    }
    // wraparound dedup: 2pi - tiny collapses onto 0
    if (out.directions.size() > 1 &&
        2 * M_PI - out.directions.back() + out.directions.front() < 1e-10)
        out.directions.pop_back();
    return out;
}

/// The convolution equation associated with the problem, built around the
/// change of unknown w = y - head that strips the x-exponents not strictly
/// above alpha (so B(c) is regular at the origin and vanishes at xi = 0).
template <class S>
class CeSystem {
public:
    CeSystem(const PdeProblem& p, long order) : p_(p), mo_(p.joint_order()), order_(order) {
        p.validate();
        auto sol = formal_solve<S>(p, order, order);
        auto F = detail::normalized_rhs<S>(p, 2 * order);
        const int d = p.joint_dim();
        const MultiIndex eps_shift = p.joint_exponent(MultiIndex(p.n), p.alpha_prime);

        // head: the x-exponents that are not strictly above alpha; the new
        // unknown w = y - head then carries only exponents beta_x > alpha
        head_ = TruncatedSeries<S>(d, sol.series.trunc_order(), p.N);
        TruncatedSeries<S> w_full(d, sol.series.trunc_order(), p.N);
        for (const auto& [beta, v] : sol.series.terms()) {
            bool strictly_above = true;
            for (int j = 0; j < p.n; ++j)
                if (beta[j] <= p.alpha[j]) {
                    strictly_above = false;
                    break;
                }
            (strictly_above ? w_full : head_).add_to(beta, v);
        }
        w_ = w_full.truncated(order);

        // forcing of the w-equation; its support is strictly above alpha, so
        // B(c) is regular at the origin and vanishes at xi = 0
        auto c_raw = detail::box_truncate(
            sub(detail::eval_rhs(F, head_, p.n, order, order),
                mul_monomial(apply_vector_field(head_.truncated(order + p.alpha.degree()), mo_),
                             eps_shift)),
            p.n, order, order);
        c_ = TruncatedSeries<S>(d, order, p.N);
        double junk = 0.0;
        for (const auto& [beta, v] : c_raw.terms()) {
            if (beta.degree() > order) continue;
            bool strictly_above = true;
            for (int j = 0; j < p.n; ++j)
                if (beta[j] <= p.alpha[j]) strictly_above = false;
            if (strictly_above) {
                c_.add_to(beta, v);
            } else {
                for (int r = 0; r < p.N; ++r)
                    junk = std::max(junk, scalar_traits<S>::abs_value(v(r)));
            }
        }
        double scale = std::max(1.0, c_raw.max_abs());
        if (junk > (scalar_traits<S>::exact ? 0.0 : 1e-9 * scale))
            throw PreconditionError("convolution equation: forcing not regular after head removal");

        // expand F(x,eps,head + w) in powers of w
        A_ = detail::MatrixSeries<S>(d, order, p.N);
        detail::PowerCache<S> cache(head_, order);
        for (const auto& [bm, M] : F.A.terms)
            if (bm.degree() <= order) A_.add_to(bm, M);
        for (const auto& [I, coef] : F.nl) {
            // multinomial expansion buckets; the K = 0 bucket is part of c
            std::vector<int> K(I.size(), 0);
            expand_buckets(I, coef, cache, K, 0);
        }
        A0_ = A_.at_origin();
        Aeta_ = A_.x0_part(p.n);
    }

    const TruncatedSeries<S>& head() const { return head_; }
    const TruncatedSeries<S>& w() const { return w_; }
    const TruncatedSeries<S>& c() const { return c_; }
    const MonomialOrder& mo() const { return mo_; }

    /// Components of Y = B(w).
    std::vector<BorelSeries<S>> borel_solution() const {
        std::vector<BorelSeries<S>> Y;
        for (int c = 0; c < p_.N; ++c) Y.push_back(formal_borel(w_.component(c), mo_));
        return Y;
    }

    /// Left side (xi^alpha eta^alpha' I - A0) Y, componentwise.
    std::vector<BorelSeries<S>> lhs(const std::vector<BorelSeries<S>>& Y) const {
        MultiIndex shift = p_.joint_exponent(p_.alpha, p_.alpha_prime);
        std::vector<BorelSeries<S>> out;
        for (int r = 0; r < p_.N; ++r) {
            TruncatedSeries<S> acc = mul_monomial(Y[r].body, shift);
            for (int c = 0; c < p_.N; ++c)
                acc = sub(acc, scale(Y[c].body, A0_(r, c)));
            out.emplace_back(std::move(acc), mo_);
        }
        return out;
    }

    /// Full right side of the convolution equation.
    std::vector<BorelSeries<S>> rhs(const std::vector<BorelSeries<S>>& Y) const {
        const int N = p_.N;
        const int d = p_.joint_dim();
        std::vector<TruncatedSeries<S>> acc;
        for (int r = 0; r < N; ++r) acc.push_back(formal_borel(c_.component(r), mo_).body);

        // B(A - A(0,eta)) * Y  +  (A(0,eta) - A0) Y
        for (int r = 0; r < N; ++r) {
            for (int c = 0; c < N; ++c) {
                auto a_rc = A_.entry(r, c);
                auto a0_rc = Aeta_.entry(r, c);
                auto mixed = sub(a_rc, a0_rc).normalize();
                if (!mixed.empty())
                    acc[r] = add(acc[r], convolve(formal_borel(mixed, mo_), Y[c]).body);
                auto inert = sub(a0_rc, TruncatedSeries<S>::constant(d, a0_rc.trunc_order(),
                                                                     A0_(r, c)))
                                 .normalize();
                if (!inert.empty()) acc[r] = add(acc[r], mul_inert(Y[c], inert).body);
            }
        }

        // nonlinear terms, convolution powers of Y
        if (!nl_.empty()) {
            std::map<std::vector<int>, BorelSeries<S>> powers;
            for (const auto& [K, coef] : nl_) {
                auto it = powers.find(K);
                if (it == powers.end()) it = powers.emplace(K, conv_power(Y, K)).first;
                const BorelSeries<S>& YK = it->second;
                for (int r = 0; r < N; ++r) {
                    auto k_r = nl_entry(K, r);
                    auto k0_r = nl_x0_entry(K, r);
                    auto mixed = sub(k_r, k0_r).normalize();
                    if (!mixed.empty())
                        acc[r] = add(acc[r], convolve(formal_borel(mixed, mo_), YK).body);
                    if (!k0_r.normalize().empty()) acc[r] = add(acc[r], mul_inert(YK, k0_r).body);
                }
            }
        }

        std::vector<BorelSeries<S>> out;
        for (int r = 0; r < N; ++r) out.emplace_back(std::move(acc[r]), mo_);
        return out;
    }

    /// Largest residual coefficient of (CE) within the resolved degrees.
    double residual() const {
        auto Y = borel_solution();
        auto L = lhs(Y);
        auto R = rhs(Y);
        const long resolved = order_ - mo_.alpha().degree();
        double worst = 0.0;
        for (int r = 0; r < p_.N; ++r) {
            auto diff = sub(L[r].body, R[r].body);
            for (const auto& [beta, v] : diff.terms())
                if (beta.degree() <= resolved)
                    worst = std::max(worst, scalar_traits<S>::abs_value(v(0)));
        }
        return worst;
    }

private:
    void expand_buckets(const std::vector<int>& I, const TruncatedSeries<S>& coef,
                        detail::PowerCache<S>& cache, std::vector<int>& K, size_t pos) {
        if (pos == I.size()) {
            long kdeg = 0;
            for (int v : K) kdeg += v;
            if (kdeg == 0) return;  // constant bucket already in c_
            std::vector<int> Hpow(I.size());
            Rational binom(1);
            for (size_t c = 0; c < I.size(); ++c) {
                Hpow[c] = I[c] - K[c];
                binom *= choose(I[c], K[c]);
            }
            auto term = detail::box_truncate(
                scale(mul(cache.power(Hpow), coef), scalar_traits<S>::from_rational(binom)), p_.n,
                order_, order_);
            if (term.normalize().empty()) return;
            if (kdeg == 1) {
                int col = 0;
                for (size_t c = 0; c < K.size(); ++c)
                    if (K[c] == 1) col = static_cast<int>(c);
                for (const auto& [beta, v] : term.terms()) {
                    DenseMat<S> M = DenseMat<S>::Constant(p_.N, p_.N, scalar_traits<S>::zero());
                    M.col(col) = v;
                    A_.add_to(beta, M);
                }
            } else {
                auto it = nl_.find(K);
                if (it == nl_.end())
                    it = nl_.emplace(K, TruncatedSeries<S>(p_.joint_dim(), order_, p_.N)).first;
                it->second = add(it->second, term);
            }
            return;
        }
        for (K[pos] = 0; K[pos] <= I[pos]; ++K[pos]) expand_buckets(I, coef, cache, K, pos + 1);
        K[pos] = 0;
    }

    static Rational choose(int n, int k) {
        Rational r(1);
        for (int i = 0; i < k; ++i) r *= Rational(n - i) / Rational(i + 1);
        return r;
    }

    TruncatedSeries<S> nl_entry(const std::vector<int>& K, int r) const {
        return nl_.at(K).component(r);
    }
    TruncatedSeries<S> nl_x0_entry(const std::vector<int>& K, int r) const {
        return detail::box_truncate(nl_.at(K).component(r), p_.n, 0, order_);
    }

    BorelSeries<S> conv_power(const std::vector<BorelSeries<S>>& Y, const std::vector<int>& K) const {
        BorelSeries<S> acc = Y[0];  // replaced below
        bool first = true;
        for (size_t c = 0; c < K.size(); ++c) {
            for (int rep = 0; rep < K[c]; ++rep) {
                if (first) {
                    acc = Y[c];
                    first = false;
                } else {
                    acc = convolve(acc, Y[c]);
                }
            }
        }
        return acc;
    }

    PdeProblem p_;
    MonomialOrder mo_;
    long order_;
    TruncatedSeries<S> head_, w_, c_;
    detail::MatrixSeries<S> A_, Aeta_;
    DenseMat<S> A0_;
    std::map<std::vector<int>, TruncatedSeries<S>> nl_;
};

/// Max coefficient magnitude of the convolution-equation residual at
/// Y = B(y - head); exact arithmetic gives 0.
template <class S>
double ce_residual_formal(const PdeProblem& p, long order) {
    return CeSystem<S>(p, order).residual();
}

/// A level-l operator polynomial eps^{l a'} X^l y + sum b_j eps^{j a'} X^j y = G.
struct HigherOrderProblem {
    int n = 1, m = 1, N = 1, l = 2;
    MultiIndex alpha, alpha_prime;
    std::vector<Rational> mu;
    std::vector<RatC> b;  // b_1 ... b_{l-1}
    std::vector<GTerm> terms;
};

/// First-order companion system of size l*N in the blocks
/// (y_0, ..., y_{l-1}) = (y, eps^{a'} X y, ..., eps^{(l-1)a'} X^{l-1} y).
/// With shifted_index = false the damping term a_j multiplies block j-1,
/// matching the displayed form; shifted_index = true pairs a_j with block j.
inline PdeProblem companion_system(const HigherOrderProblem& hop, bool shifted_index = false) {
    if (hop.l < 2) throw PreconditionError("companion_system: l must be >= 2");
    if (static_cast<int>(hop.b.size()) != hop.l - 1)
        throw ParseError("companion_system: need l-1 damping coefficients");
    PdeProblem sys;
    sys.n = hop.n;
    sys.m = hop.m;
    sys.N = hop.l * hop.N;
    sys.alpha = hop.alpha;
    sys.alpha_prime = hop.alpha_prime;
    sys.mu = hop.mu;

    Rational kappa(0);
    for (int j = 0; j < hop.n; ++j) kappa += hop.mu[j] * Rational(hop.alpha[j]);
    RatC kap(kappa);
    // kappa^{1-l}
    RatC kap_pow(Rational(1));
    for (int i = 0; i < hop.l - 1; ++i) kap_pow /= kap;

    // chain rows: block q gets kappa * y_{q+1}
    for (int q = 0; q < hop.l - 1; ++q) {
        for (int c = 0; c < hop.N; ++c) {
            GTerm t;
            t.x = MultiIndex(hop.n);
            t.eps = MultiIndex(hop.m);
            t.ypow.assign(sys.N, 0);
            t.ypow[(q + 1) * hop.N + c] = 1;
            t.coef.assign(sys.N, RatC());
            t.coef[q * hop.N + c] = kap;
            sys.terms.push_back(std::move(t));
        }
    }
    // last block: kappa^{1-l} G(x,eps,y_0) - kappa * sum_j a_j y_block
    for (const auto& t0 : hop.terms) {
        GTerm t;
        t.x = t0.x;
        t.eps = t0.eps;
        t.ypow.assign(sys.N, 0);
        for (int c = 0; c < hop.N; ++c) t.ypow[c] = t0.ypow[c];
        t.coef.assign(sys.N, RatC());
        for (int r = 0; r < hop.N; ++r) t.coef[(hop.l - 1) * hop.N + r] = kap_pow * t0.coef[r];
        sys.terms.push_back(std::move(t));
    }
    RatC apow = kap_pow;  // kappa^{j-l} for j = 1
    for (int j = 1; j <= hop.l - 1; ++j) {
        RatC aj = apow * hop.b[j - 1];
        int block = shifted_index ? j : j - 1;
        for (int c = 0; c < hop.N; ++c) {
            if (aj.is_zero()) continue;
            GTerm t;
            t.x = MultiIndex(hop.n);
            t.eps = MultiIndex(hop.m);
            t.ypow.assign(sys.N, 0);
            t.ypow[block * hop.N + c] = 1;
            t.coef.assign(sys.N, RatC());
            t.coef[(hop.l - 1) * hop.N + c] = RatC() - kap * aj;
            sys.terms.push_back(std::move(t));
        }
        apow *= kap;
    }
    return sys;
}

/// Grid supremum of |f(x,eps)| (r-|x_1|)^l ... (r-|x_n|)^l over the polydisc,
/// sampled on radial x angular tensor grids.
inline double nagumo_norm(const TruncatedSeries<Cplx>& f, int n, int l, double r, int radial = 64,
                          int angular = 4, double eps_radius = 0.5) {
    if (r <= 0) throw PreconditionError("nagumo_norm: radius must be positive");
    const int d = f.dim();
    double best = 0.0;
    std::vector<Cplx> point(d);
    // iterate the tensor grid
    std::vector<int> state(2 * d, 0);
    while (true) {
        double weight = 1.0;
        for (int j = 0; j < d; ++j) {
            double rho = (j < n ? r : eps_radius) * (state[j] + 0.5) / radial;
            double phi = 2 * M_PI * state[d + j] / angular;
            point[j] = std::polar(rho, phi);
            if (j < n)
                for (int rep = 0; rep < l; ++rep) weight *= (r - rho);
        }
        double val = 0.0;
        auto v = f.evaluate(point);
        for (int c = 0; c < f.ncomp(); ++c) val = std::max(val, std::abs(v(c)));
        best = std::max(best, val * weight);
        int pos = 0;
        while (pos < 2 * d) {
            int lim = pos < d ? radial : angular;
            if (++state[pos] < lim) break;
            state[pos++] = 0;
        }
        if (pos == 2 * d) break;
    }
    return best;
}

}  // namespace monosum
