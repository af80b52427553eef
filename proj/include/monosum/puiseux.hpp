#pragma once

#include <vector>

#include <Eigen/Core>

#include "monosum/borel.hpp"

namespace monosum {

/// One-variable series on a rational exponent grid: the represented function
/// of u is u^lead * sum_q coeffs[q] u^{q/denom}. Produced by restricting a
/// Borel-plane series to a weighted ray; the input of Pade continuation and
/// Laplace quadrature.
struct PuiseuxSeries {
    Rational lead{0};
    long denom = 1;
    int ncomp = 1;
    std::vector<Eigen::VectorXcd> coeffs;

    bool empty() const {
        for (const auto& v : coeffs)
            if (v.norm() > 0) return false;
        return true;
    }
};

/// Restriction of the represented object to the ray xi_j = x_j u^{lambda_j}:
/// the term b_beta xi^{beta+offset} contributes b_beta x^{beta+offset} at
/// u-exponent <beta+offset, lambda>. Requires rational lambda (true by
/// construction) and x_j != 0 on the weighted variables; fractional offset
/// powers of x_j use the principal branch, which cancels exactly against the
/// prefactor convention of the Laplace quadrature.
PuiseuxSeries ray_restrict(const BorelSeries<Cplx>& g, const std::vector<Cplx>& x);

}  // namespace monosum
