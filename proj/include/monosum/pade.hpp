#pragma once

#include <vector>

#include "monosum/puiseux.hpp"

namespace monosum {

/// Near-diagonal Pade approximant of a Puiseux series in v = u^{1/D}.
/// Each component factors its support as v^{q0} U(v^{stride}) and carries a
/// rational function N/Q in w = v^{stride}; this keeps interleaved-zero
/// coefficient patterns away from degenerate Toeplitz blocks.
struct ComponentPade {
    long q0 = 0;
    long stride = 1;
    double scale = 1.0;     // rational function is in w/scale; flattens
                            // factorial coefficient growth before the solve
    std::vector<Cplx> num;  // ascending powers of w/scale
    std::vector<Cplx> den;  // den[0] = 1
    bool zero = true;
};

struct PadeApproximant {
    Rational lead{0};
    long denom = 1;
    int ncomp = 1;
    std::vector<ComponentPade> comps;
    std::vector<Cplx> poles;  // u-plane locations, Froissart doublets removed

    /// Value at u (principal branch of u^{1/denom}); u = 0 is the limit.
    Eigen::VectorXcd eval(Cplx u) const;
    /// Largest |value| over the components, for tail estimates.
    double magnitude(Cplx u) const;
};

/// Builds the [L/M] approximant with L+M+1 <= available coefficients and M
/// near degree_hint (or the balanced choice when the hint is <= 0). Poles
/// paired with a nearby zero (distance < 1e-8) carrying residue < 1e-10 are
/// filtered from the reported list as Froissart doublets.
PadeApproximant pade_continue(const PuiseuxSeries& p, int degree_hint = 0);

}  // namespace monosum
