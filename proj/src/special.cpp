#include <cmath>

#include "monosum/errors.hpp"
#include "monosum/summation.hpp"

namespace monosum {

double I_of_s(double s) {
    if (!(s >= 0)) throw PreconditionError("I_of_s: s must be nonnegative");
    if (s < 1e-6) {
        // ratio expansion near 0, the closed form cancels there
        double s2 = s * s;
        return (4.0 - (5.0 / 3.0) * s2 + (16.0 / 15.0) * s2 * s2) / (4.0 + s2);
    }
    double s2 = s * s;
    return 2.0 * (std::log1p(s2) + s * std::atan(s)) / (s2 * (4.0 + s2));
}

double M0() {
    auto h = [](double s) { return s * (1.0 + s * s) * I_of_s(s); };
    // coarse bracket of the maximum on a log grid, then golden section
    double best_s = 1.0, best = h(1.0);
    for (int i = 0; i <= 400; ++i) {
        double s = std::exp(std::log(0.05) + (std::log(200.0) - std::log(0.05)) * i / 400.0);
        double v = h(s);
        if (v > best) {
            best = v;
            best_s = s;
        }
    }
    double a = best_s / 1.5, b = best_s * 1.5;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double hc = h(c), hd = h(d);
    while (b - a > 1e-12) {
        if (hc > hd) {
            b = d;
            d = c;
            hd = hc;
            c = b - gr * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + gr * (b - a);
            hd = h(d);
        }
    }
    return h(0.5 * (a + b));
}

double C_mu_rho(double mu, double rho, double a, int n) {
    if (!(mu > std::max(4.0 * std::sqrt(2.0), std::pow(2.0 / rho, 1.0 / a))))
        throw PreconditionError("C_mu_rho: mu must exceed max(4 sqrt 2, (2/rho)^{1/a})");
    double t = 2.0 / (std::pow(mu, a) * rho);
    return 3.0 * (std::pow(1.0 - t, -n) - 1.0);
}

}  // namespace monosum
