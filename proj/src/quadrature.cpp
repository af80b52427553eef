#include "monosum/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "monosum/errors.hpp"

namespace monosum {

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    std::vector<double> x(order), w(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
    return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

double integration_horizon(const PadeApproximant& f, double tol, double phi) {
    const double cphi = std::cos(phi);
    double u_max = std::max(10.0, -std::log(tol) + 5.0);
    while (u_max < 1e4 && f.magnitude(std::polar(u_max, phi)) * std::exp(-u_max * cphi) > tol / 10.0)
        u_max *= 1.5;
    if (u_max >= 1e4) throw ConvergenceError("laplace_quadrature: integrand tail does not decay");
    return u_max;
}

SumResult laplace_quadrature(const PadeApproximant& f, const MonomialOrder& mo,
                             const std::vector<Cplx>& x, double phi, double tol) {
    if (!(tol > 0)) throw PreconditionError("laplace_quadrature: tol must be positive");
    if (!(std::abs(phi) < M_PI / 2))
        throw SingularDirectionError("laplace_quadrature: ray angle |phi| must be below pi/2");

    const double u_max = integration_horizon(f, tol, phi);

    // singular-direction guard: distance from every retained pole to the
    // integration segment [0, u_max e^{i phi}]
    const double guard = 10.0 * tol;
    for (const Cplx& pole : f.poles) {
        Cplx z = pole * std::polar(1.0, -phi);
        double dist;
        if (z.real() < 0.0)
            dist = std::abs(z);
        else if (z.real() > u_max)
            dist = std::abs(z - Cplx(u_max, 0.0));
        else
            dist = std::abs(z.imag());
        if (dist < guard)
            throw SingularDirectionError("laplace_quadrature: approximant pole on or near the ray");
    }

    // panel breakpoints, geometric in t = |u|
    std::vector<double> breaks{0.0, 1.0};
    while (breaks.back() < u_max) breaks.push_back(std::min(2.0 * breaks.back(), u_max));
    const int npanels = static_cast<int>(breaks.size()) - 1;

    // u = sigma^D e^{i phi} clears fractional powers at the origin
    const double D = static_cast<double>(f.denom);
    const Cplx ray = std::polar(1.0, phi);
    auto integrand = [&](double sigma) -> Eigen::VectorXcd {
        double t = std::pow(sigma, D);
        Cplx u = t * ray;
        return (f.eval(u) * std::exp(-u) * ray * D * std::pow(sigma, D - 1.0)).eval();
    };

    Eigen::VectorXcd total = Eigen::VectorXcd::Zero(f.ncomp);
    double err_est = 0.0;
    const double panel_tol = tol / (2.0 * npanels);
    for (int pan = 0; pan < npanels; ++pan) {
        double a = std::pow(breaks[pan], 1.0 / D);
        double b = std::pow(breaks[pan + 1], 1.0 / D);
        Eigen::VectorXcd prev = Eigen::VectorXcd::Zero(f.ncomp);
        bool have_prev = false, converged = false;
        double diff = 0.0;
        for (int nodes = 8; nodes <= 1024; nodes *= 2) {
            const auto& [gx, gw] = gauss_legendre(nodes);
            Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(f.ncomp);
            for (int i = 0; i < nodes; ++i) {
                double sigma = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
                acc += gw[i] * integrand(sigma);
            }
            acc *= 0.5 * (b - a);
            if (have_prev) {
                diff = (acc - prev).cwiseAbs().maxCoeff();
                if (diff < panel_tol) {
                    prev = acc;
                    converged = true;
                    break;
                }
            }
            prev = acc;
            have_prev = true;
        }
        if (!converged) throw ConvergenceError("laplace_quadrature: panel refinement did not converge");
        total += prev;
        err_est += diff;
    }

    Cplx prefactor(1.0, 0.0);
    for (int j : mo.weighted_indices()) prefactor *= std::pow(x[j], to_double(mo.threshold(j)));

    SumResult out;
    out.value = prefactor * total;
    out.direction = phi;
    out.quadrature_error_estimate = err_est;
    out.pade_pole_locations = f.poles;
    return out;
}

}  // namespace monosum
