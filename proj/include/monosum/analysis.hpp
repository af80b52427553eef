#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "monosum/gamma.hpp"
#include "monosum/series.hpp"

namespace monosum {

/// Monomial decomposition f = sum_n f_{alpha,n} x^{n*alpha}: component n
/// collects the coefficients a_{n*alpha+beta} with alpha not<= beta, so each
/// component vanishes to order alpha in every variable jointly. Component n
/// is returned with truncation order T - n*|alpha|.
template <class S>
std::vector<TruncatedSeries<S>> t_decompose(const TruncatedSeries<S>& f, const MultiIndex& alpha) {
    if (alpha.dim() != f.dim()) throw std::invalid_argument("t_decompose: dimension mismatch");
    if (!alpha.all_positive()) throw std::invalid_argument("t_decompose: alpha entries must be >= 1");
    long nmax = f.trunc_order() / alpha.degree();
    std::vector<TruncatedSeries<S>> comps;
    comps.reserve(nmax + 1);
    for (long n = 0; n <= nmax; ++n)
        comps.emplace_back(f.dim(), f.trunc_order() - n * alpha.degree(), f.ncomp());
    for (const auto& [gamma, v] : f.terms()) {
        long n = gamma[0] / alpha[0];
        for (int j = 1; j < f.dim(); ++j) n = std::min<long>(n, gamma[j] / alpha[j]);
        MultiIndex beta(f.dim());
        for (int j = 0; j < f.dim(); ++j) beta[j] = gamma[j] - static_cast<int>(n) * alpha[j];
        if (n <= nmax && beta.degree() <= comps[n].trunc_order()) comps[n].add_to(beta, v);
    }
    for (auto& c : comps) c.normalize();
    return comps;
}

/// Reassembly sum_n f_{alpha,n} x^{n*alpha} of a component list.
template <class S>
TruncatedSeries<S> t_reassemble(const std::vector<TruncatedSeries<S>>& comps, const MultiIndex& alpha,
                                long trunc) {
    if (comps.empty()) throw std::invalid_argument("t_reassemble: no components");
    TruncatedSeries<S> r(comps[0].dim(), trunc, comps[0].ncomp());
    for (size_t n = 0; n < comps.size(); ++n) {
        for (const auto& [beta, v] : comps[n].terms()) {
            MultiIndex gamma = beta;
            for (int j = 0; j < r.dim(); ++j) gamma[j] += static_cast<int>(n) * alpha[j];
            if (gamma.degree() <= trunc) r.add_to(gamma, v);
        }
    }
    return r.normalize();
}

/// Formal approximant of order gamma: keeps exactly the terms with
/// gamma not<= beta.
template <class S>
TruncatedSeries<S> approximate(const TruncatedSeries<S>& f, const MultiIndex& gamma) {
    if (gamma.dim() != f.dim()) throw std::invalid_argument("approximate: dimension mismatch");
    TruncatedSeries<S> r(f.dim(), f.trunc_order(), f.ncomp());
    for (const auto& [beta, v] : f.terms())
        if (!gamma.leq(beta)) r.add_to(beta, v);
    return r;
}

struct GevreyFit {
    double s_hat = 0.0;
    double C = 0.0;
    double A = 0.0;
    double r2 = 0.0;
};

namespace detail {
inline double log_min_factorial(const MultiIndex& beta, const MultiIndex& alpha) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < beta.dim(); ++j)
        m = std::min(m, GammaKernel::log_gamma(beta[j] + 1.0) / alpha[j]);
    return m;
}
}  // namespace detail

/// Coefficient-growth diagnostic: regress per-shell maxima
/// log m_D = log C + D log A + s * log(min_j beta_j!^{1/alpha_j}) where the
/// factorial term is taken at the shell's dominant exponent (lexicographically
/// smallest on ties). Factorials go through log Gamma throughout.
template <class S>
GevreyFit gevrey_fit(const TruncatedSeries<S>& f, const MultiIndex& alpha) {
    if (alpha.dim() != f.dim()) throw std::invalid_argument("gevrey_fit: dimension mismatch");
    long dmax = f.max_stored_degree();
    if (dmax < 8) throw std::invalid_argument("gevrey_fit: need coefficients up to total degree >= 8");

    std::vector<double> logm, lfac, shells;
    for (long D = 0; D <= dmax; ++D) {
        double best = 0.0;
        const MultiIndex* arg = nullptr;
        for (const auto& [beta, v] : f.terms()) {
            if (beta.degree() != D) continue;
            double a = 0.0;
            for (int c = 0; c < f.ncomp(); ++c) a = std::max(a, scalar_traits<S>::abs_value(v(c)));
            if (a > best || (a == best && a > 0.0 && arg && beta < *arg)) {
                best = a;
                arg = &beta;
            }
        }
        if (!arg || best <= 0.0) continue;
        shells.push_back(static_cast<double>(D));
        logm.push_back(std::log(best));
        lfac.push_back(detail::log_min_factorial(*arg, alpha));
    }
    const int n = static_cast<int>(shells.size());
    if (n < 3) throw std::invalid_argument("gevrey_fit: too few nonzero coefficients to fit");

    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = shells[i];
        X(i, 2) = lfac[i];
        y(i) = logm[i];
    }
    Eigen::Vector3d beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    double ss_res = (y - X * beta).squaredNorm();
    double mean = y.mean();
    double ss_tot = (y.array() - mean).square().sum();

    GevreyFit fit;
    fit.s_hat = std::max(0.0, beta(2));
    fit.C = std::exp(beta(0));
    fit.A = std::exp(beta(1));
    fit.r2 = ss_tot > 1e-30 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return fit;
}

/// Bracketing data from the factorial bounds: N_min! is pinned between the
/// min-factorial chain, N_max! between the max-factorial chain.
struct FactorialShellBounds {
    long n_min = 0;
    long n_max = 0;
    double lower_min = 0.0;  // |alpha|^{-|gamma|} min_j gamma_j!^{1/alpha_j}
    double upper_min = 0.0;  // min_j gamma_j!^{1/alpha_j}
    double lower_max = 0.0;  // |alpha|^{-2|gamma|} max_j gamma_j!^{1/alpha_j}
    double upper_max = 0.0;  // |alpha| 2^{2|gamma|} max_j gamma_j!^{1/alpha_j}
};

inline FactorialShellBounds factorial_shell_bounds(const MultiIndex& gamma, const MultiIndex& alpha) {
    if (gamma.dim() != alpha.dim()) throw std::invalid_argument("factorial_shell_bounds: dimension mismatch");
    if (gamma.is_zero()) throw std::invalid_argument("factorial_shell_bounds: gamma must be nonzero");
    if (!alpha.all_positive()) throw std::invalid_argument("factorial_shell_bounds: alpha entries must be >= 1");
    FactorialShellBounds out;
    long fmin = gamma[0] / alpha[0], fmax = fmin;
    double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
    for (int j = 0; j < gamma.dim(); ++j) {
        long fl = gamma[j] / alpha[j];
        fmin = std::min(fmin, fl);
        fmax = std::max(fmax, fl);
        double lf = GammaKernel::log_gamma(gamma[j] + 1.0) / alpha[j];
        lmin = std::min(lmin, lf);
        lmax = std::max(lmax, lf);
    }
    out.n_min = fmin;
    out.n_max = fmax + 1;
    const double la = std::log(static_cast<double>(alpha.degree()));
    const double g = static_cast<double>(gamma.degree());
    out.lower_min = std::exp(lmin - g * la);
    out.upper_min = std::exp(lmin);
    out.lower_max = std::exp(lmax - 2.0 * g * la);
    out.upper_max = std::exp(lmax + la + 2.0 * g * std::log(2.0));
    return out;
}

}  // namespace monosum
