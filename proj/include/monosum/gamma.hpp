#pragma once

#include <stdexcept>

#include "monosum/rational.hpp"

namespace monosum {

/// Thrown by exact-mode transforms when a Gamma argument is not a positive
/// integer, i.e. the value has no rational representation.
struct ExactModeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stateless evaluator of log Gamma on the positive reals, Lanczos
/// approximation with g = 7 and 9 coefficients.
class GammaKernel {
public:
    static double log_gamma(double x);
    static double gamma(double x);
};

/// Exact Gamma(q) for integer q >= 1; throws ExactModeError otherwise.
Rational gamma_exact(const Rational& q);

/// Gamma(arg) in the scalar of the active mode. The numeric instantiation
/// accepts any positive argument, the exact one only positive integers.
template <class S> S gamma_of(const Rational& arg);

template <> inline Cplx gamma_of<Cplx>(const Rational& arg) {
    double x = to_double(arg);
    if (x <= 0.0) throw std::domain_error("gamma_of: nonpositive argument");
    return Cplx(GammaKernel::gamma(x), 0.0);
}

template <> inline RatC gamma_of<RatC>(const Rational& arg) { return RatC(gamma_exact(arg)); }

}  // namespace monosum
