#include "monosum/summation.hpp"

#include <cmath>

#include "monosum/errors.hpp"
#include "monosum/puiseux.hpp"

namespace monosum {

PuiseuxSeries ray_restrict(const BorelSeries<Cplx>& g, const std::vector<Cplx>& x) {
    const auto& mo = g.mo;
    if (static_cast<int>(x.size()) != mo.dim())
        throw std::invalid_argument("ray_restrict: point dimension mismatch");
    for (int j : mo.weighted_indices())
        if (std::abs(x[j]) == 0.0)
            throw PreconditionError("ray_restrict: x on a coordinate axis of the weighted variables");

    PuiseuxSeries out;
    out.ncomp = g.body.ncomp();
    if (g.body.terms().empty()) {
        out.coeffs.clear();
        return out;
    }

    // exponent of each term and the common grid
    std::vector<std::pair<Rational, Eigen::VectorXcd>> entries;
    mpz_class denom_lcm(1);
    bool first = true;
    Rational lead(0);
    for (const auto& [beta, v] : g.body.terms()) {
        Rational e = g.represented_pairing(beta);
        Cplx weight(1.0, 0.0);
        for (int j = 0; j < mo.dim(); ++j) {
            Rational expo = Rational(beta[j]) + g.offset[j];
            if (expo == 0) continue;
            if (is_integer(expo)) {
                long p = expo.get_num().get_si();
                Cplx base = x[j];
                Cplx acc(1.0, 0.0);
                for (long i = 0; i < std::abs(p); ++i) acc *= base;
                weight *= (p >= 0) ? acc : Cplx(1.0, 0.0) / acc;
            } else {
                weight *= std::pow(x[j], to_double(expo));
            }
        }
        entries.emplace_back(e, (weight * v).eval());
        mpz_lcm(denom_lcm.get_mpz_t(), denom_lcm.get_mpz_t(), e.get_den().get_mpz_t());
        if (first || e < lead) lead = e;
        first = false;
    }
    out.lead = lead;
    out.denom = denom_lcm.get_si();

    long qmax = 0;
    for (const auto& [e, v] : entries) {
        Rational q = (e - lead) * Rational(out.denom);
        qmax = std::max(qmax, q.get_num().get_si());
    }
    out.coeffs.assign(qmax + 1, Eigen::VectorXcd::Zero(out.ncomp));
    for (const auto& [e, v] : entries) {
        Rational q = (e - lead) * Rational(out.denom);
        out.coeffs[q.get_num().get_si()] += v;
    }
    return out;
}

SumResult monomial_borel_sum(const TruncatedSeries<Cplx>& f, const MonomialOrder& mo,
                             const std::vector<Cplx>& x, double theta, double tol, int pade_hint) {
    if (static_cast<int>(x.size()) != f.dim())
        throw std::invalid_argument("monomial_borel_sum: point dimension mismatch");
    auto [head, tail] = split_summand(f, mo);
    Eigen::VectorXcd head_value = head.evaluate(x);

    if (tail.normalize().empty()) {
        SumResult out;
        out.value = head_value;
        out.direction = 0.0;
        return out;
    }

    // ray angle phi = k (theta - arg(x^alpha)), reduced modulo 2 pi k
    double psi = 0.0;
    for (int j = 0; j < mo.dim(); ++j) psi += mo.alpha()[j] * std::arg(x[j]);
    const double k = to_double(mo.k());
    double phi = std::remainder(k * (theta - psi), 2.0 * M_PI * k);

    auto borel = formal_borel(tail, mo);
    auto ray = ray_restrict(borel, x);
    // short tails are genuine polynomials in the ray variable
    while (ray.coeffs.size() < 8) ray.coeffs.push_back(Eigen::VectorXcd::Zero(ray.ncomp));
    auto approximant = pade_continue(ray, pade_hint);

    if (!(std::abs(phi) < M_PI / 2 * 0.999)) {
        // The target ray is not directly integrable. Sweeping the direction
        // down to the base ray phi = 0 is legitimate when no singularity of
        // the continued Borel function sits in the swept arc; approximant
        // poles beyond the e^{-u} horizon carry no weight in the integral
        // and do not count as singular structure.
        const double horizon = integration_horizon(approximant, tol, 0.0);
        const double lo = std::min(0.0, phi), hi = std::max(0.0, phi);
        for (const Cplx& pole : approximant.poles) {
            if (std::abs(pole) > horizon) continue;
            double a = std::arg(pole);
            if (a >= lo - 1e-9 && a <= hi + 1e-9)
                throw SingularDirectionError(
                    "monomial_borel_sum: direction blocked by a Borel singularity");
        }
        phi = 0.0;
    }

    SumResult out = laplace_quadrature(approximant, mo, x, phi, tol);
    out.value += head_value;
    return out;
}

double weighted_radius(const std::vector<Cplx>& xi, const std::vector<double>& c) {
    double r = 0.0;
    for (size_t j = 0; j < xi.size(); ++j)
        if (c[j] != 0.0) r = std::max(r, std::pow(std::abs(xi[j]), c[j]));
    return r;
}

std::pair<double, double> exp_growth_fit(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 10) throw PreconditionError("exp_growth_fit: need at least 10 samples");
    double rmin = samples[0].first, rmax = samples[0].first;
    for (const auto& [r, v] : samples) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    if (!(rmax >= 10.0 * std::max(rmin, 1e-300)))
        throw PreconditionError("exp_growth_fit: samples must span a decade in R");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(samples.size());
    for (const auto& [r, v] : samples) {
        double y = std::log(std::max(v, 1e-300));
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
    }
    double M = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double logC = (sy - M * sx) / n;
    return {std::exp(logC), M};
}

double norm_mu(const std::vector<std::pair<double, double>>& samples, double mu) {
    if (!(mu > 0)) throw PreconditionError("norm_mu: mu must be positive");
    const double m0 = M0();
    double best = 0.0;
    for (const auto& [r, v] : samples)
        best = std::max(best, v * (1.0 + r * r) * std::exp(-mu * r));
    return m0 * best;
}

}  // namespace monosum
