#pragma once

#include <functional>
#include <vector>

#include "monosum/monomial_order.hpp"
#include "monosum/pade.hpp"

namespace monosum {

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

/// Result of a directional Laplace integration (or of the full summation
/// pipeline): value, ray direction phi, panel-refinement error estimate and
/// the retained approximant poles.
struct SumResult {
    Eigen::VectorXcd value;
    double direction = 0.0;
    double quadrature_error_estimate = 0.0;
    std::vector<Cplx> pade_pole_locations;
};

/// Truncation radius u_max of the weighted ray integral: the point past
/// which the integrand tail |f| e^{-u cos phi} stays below tol/10.
double integration_horizon(const PadeApproximant& f, double tol, double phi);

/// x^{k alpha_{J_s}} Int_0^{e^{i phi} inf} f(u) e^{-u} du by adaptive
/// Gauss-Legendre panels with doubling node counts, after the substitution
/// u = sigma^D e^{i phi} that clears fractional powers at the origin.
/// Requires |phi| < pi/2 and no retained pole within 10*tol of the ray.
SumResult laplace_quadrature(const PadeApproximant& f, const MonomialOrder& mo,
                             const std::vector<Cplx>& x, double phi, double tol);

}  // namespace monosum
