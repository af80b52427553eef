#include "monosum/pade.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "monosum/errors.hpp"

namespace monosum {

namespace {

std::vector<Cplx> poly_roots(const std::vector<Cplx>& p) {
    int deg = static_cast<int>(p.size()) - 1;
    while (deg > 0 && std::abs(p[deg]) < 1e-300) --deg;
    if (deg < 1) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) {
        C(i, deg - 1) = -p[i] / p[deg];
        if (i > 0) C(i, i - 1) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<Cplx> roots(deg);
    for (int i = 0; i < deg; ++i) roots[i] = es.eigenvalues()(i);
    return roots;
}

Cplx poly_eval(const std::vector<Cplx>& p, Cplx w) {
    Cplx acc(0.0, 0.0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * w + *it;
    return acc;
}

Cplx poly_deriv_eval(const std::vector<Cplx>& p, Cplx w) {
    Cplx acc(0.0, 0.0);
    for (int i = static_cast<int>(p.size()) - 1; i >= 1; --i)
        acc = acc * w + static_cast<double>(i) * p[i];
    return acc;
}

}  // namespace

Eigen::VectorXcd PadeApproximant::eval(Cplx u) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ncomp);
    const double dlead = to_double(lead);
    for (int c = 0; c < ncomp; ++c) {
        const auto& cp = comps[c];
        if (cp.zero) continue;
        double expo0 = dlead + static_cast<double>(cp.q0) / denom;
        if (std::abs(u) == 0.0) {
            if (expo0 > 0)
                out(c) = 0.0;
            else if (expo0 == 0.0)
                out(c) = poly_eval(cp.num, 0.0) / poly_eval(cp.den, 0.0);
            else
                throw std::domain_error("PadeApproximant: negative exponent at u = 0");
            continue;
        }
        Cplx v = std::pow(u, 1.0 / static_cast<double>(denom));
        Cplx w = std::pow(v, static_cast<double>(cp.stride)) / cp.scale;
        Cplx front = std::pow(u, expo0);
        out(c) = front * poly_eval(cp.num, w) / poly_eval(cp.den, w);
    }
    return out;
}

double PadeApproximant::magnitude(Cplx u) const {
    Eigen::VectorXcd v = eval(u);
    double m = 0.0;
    for (int c = 0; c < ncomp; ++c) m = std::max(m, std::abs(v(c)));
    return m;
}

PadeApproximant pade_continue(const PuiseuxSeries& p, int degree_hint) {
    PadeApproximant out;
    out.lead = p.lead;
    out.denom = p.denom;
    out.ncomp = p.ncomp;
    if (p.empty()) throw PreconditionError("pade_continue: zero series has no approximant");
    if (p.coeffs.size() < 8) throw PreconditionError("pade_continue: need at least 8 coefficients");

    for (int c = 0; c < p.ncomp; ++c) {
        ComponentPade cp;
        std::vector<long> nz;
        for (size_t q = 0; q < p.coeffs.size(); ++q)
            if (std::abs(p.coeffs[q](c)) > 0.0) nz.push_back(static_cast<long>(q));
        if (nz.empty()) {
            out.comps.push_back(cp);
            continue;
        }
        cp.zero = false;
        cp.q0 = nz.front();
        long g = 0;
        for (long q : nz) g = std::gcd(g, q - cp.q0);
        cp.stride = std::max(1L, g);
        const long K = (nz.back() - cp.q0) / cp.stride + 1;
        std::vector<Cplx> u(K, Cplx(0.0, 0.0));
        for (long i = 0; i < K; ++i) u[i] = p.coeffs[cp.q0 + i * cp.stride](c);

        // geometric rescaling w -> scale * w keeps the Toeplitz solve
        // well conditioned against factorial coefficient growth
        if (K > 1) {
            double mf = std::abs(u[0]), ml = std::abs(u[K - 1]);
            long last = K - 1;
            while (last > 0 && ml == 0.0) ml = std::abs(u[--last]);
            if (last > 0 && ml > 0.0 && mf > 0.0)
                cp.scale = std::pow(mf / ml, 1.0 / static_cast<double>(last));
            double zeta = 1.0;
            for (long i = 0; i < K; ++i) {
                u[i] *= zeta;
                zeta *= cp.scale;
            }
        }

        long M = (K - 1) / 2;
        if (degree_hint > 0) M = std::min<long>(M, degree_hint);
        auto coeff_at = [&](long i) { return (i >= 0 && i < K) ? u[i] : Cplx(0.0, 0.0); };
        bool built = false;
        while (!built) {
            const long L = K - 1 - M;
            if (M == 0) {
                cp.num.assign(u.begin(), u.begin() + (L + 1));
                cp.den = {Cplx(1.0, 0.0)};
                built = true;
                break;
            }
            Eigen::MatrixXcd T(M, M);
            Eigen::VectorXcd rhs(M);
            for (long i = 1; i <= M; ++i) {
                for (long j = 1; j <= M; ++j) T(i - 1, j - 1) = coeff_at(L + i - j);
                rhs(i - 1) = -coeff_at(L + i);
            }
            auto cod = T.completeOrthogonalDecomposition();
            if (cod.rank() < M) {
                // degenerate Toeplitz block: the series is rational of lower
                // type, so drop to the revealed rank for a clean denominator
                M = std::max(0L, static_cast<long>(cod.rank()));
                continue;
            }
            Eigen::VectorXcd b = cod.solve(rhs);
            if (b.allFinite()) {
                cp.den.assign(M + 1, Cplx(0.0, 0.0));
                cp.den[0] = 1.0;
                for (long j = 1; j <= M; ++j) cp.den[j] = b(j - 1);
                cp.num.assign(L + 1, Cplx(0.0, 0.0));
                for (long i = 0; i <= L; ++i)
                    for (long j = 0; j <= std::min(i, M); ++j) cp.num[i] += cp.den[j] * coeff_at(i - j);
                built = true;
            } else {
                --M;
            }
        }
        if (cp.den.empty() || std::abs(cp.den[0]) == 0.0)
            throw PreconditionError("pade_continue: degenerate denominator");

        // poles, residues and the Froissart filter
        auto wpoles = poly_roots(cp.den);
        auto wzeros = poly_roots(cp.num);
        for (const Cplx& wp : wpoles) {
            double near_zero = std::numeric_limits<double>::infinity();
            for (const Cplx& z : wzeros) near_zero = std::min(near_zero, std::abs(wp - z));
            Cplx qd = poly_deriv_eval(cp.den, wp);
            Cplx residue = std::abs(qd) > 0 ? poly_eval(cp.num, wp) / qd : Cplx(0.0, 0.0);
            if (near_zero < 1e-8 && std::abs(residue) < 1e-10) continue;  // Froissart doublet
            // undo the scaling, then map back to the u-plane: u^{stride/denom} = w
            const Cplx wp_true = wp * cp.scale;
            const double ratio = static_cast<double>(out.denom) / cp.stride;
            double r = std::pow(std::abs(wp_true), ratio);
            double base = std::arg(wp_true);
            long jmax = static_cast<long>(std::ceil(cp.stride / (2.0 * out.denom))) + 1;
            for (long j = -jmax; j <= jmax; ++j) {
                double th = (base + 2 * M_PI * j) * ratio;
                if (th > -M_PI - 1e-12 && th <= M_PI + 1e-12)
                    out.poles.push_back(std::polar(r, th));
            }
        }
        out.comps.push_back(std::move(cp));
    }
    return out;
}

}  // namespace monosum
