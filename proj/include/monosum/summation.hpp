#pragma once

#include <utility>
#include <vector>

#include "monosum/quadrature.hpp"
#include "monosum/series.hpp"

namespace monosum {

/// Numeric monomial Borel sum of f in direction theta at the point x:
/// split_summand -> formal_borel -> ray_restrict -> pade_continue ->
/// laplace_quadrature, plus the head evaluated directly. The ray angle is
/// phi = k(theta - arg(x^alpha)), required to satisfy |phi| < pi/2.
SumResult monomial_borel_sum(const TruncatedSeries<Cplx>& f, const MonomialOrder& mo,
                             const std::vector<Cplx>& x, double theta, double tol,
                             int pade_hint = 0);

/// R_c(xi) = max over the weighted entries of |xi_j|^{c_j}.
double weighted_radius(const std::vector<Cplx>& xi, const std::vector<double>& c);

/// Fit ||value|| <= C exp(M R) by least squares on (R, ||value||) samples.
/// Requires at least 10 samples spanning a decade in R.
std::pair<double, double> exp_growth_fit(const std::vector<std::pair<double, double>>& samples);

/// Closed form of I(s) = Int_0^1 dt / ((1+s^2 t^2)(1+s^2(1-t)^2)).
double I_of_s(double s);

/// M0 = sup_{s>0} s(1+s^2) I(s), by coarse bracketing plus golden-section.
double M0();

/// Weighted supremum norm M0 * sup |f| (1+R^2) e^{-mu R} over (R, |f|) samples.
double norm_mu(const std::vector<std::pair<double, double>>& samples, double mu);

/// C_{mu,rho} = 3((1 - 2/(mu^a rho))^{-n} - 1); requires
/// mu > max(4 sqrt 2, (2/rho)^{1/a}).
double C_mu_rho(double mu, double rho, double a, int n);

}  // namespace monosum
