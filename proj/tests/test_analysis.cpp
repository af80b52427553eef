#include <cmath>
#include <random>

#include "doctest.h"

#include "monosum/analysis.hpp"
#include "test_util.hpp"

using namespace monosum;

namespace {
Rational factorial(int n) {
    Rational f(1);
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}
}  // namespace

TEST_CASE("t_decompose: exponent splits") {
    TruncatedSeries<RatC> f(2, 4);
    f.set_coeff(MultiIndex{0, 0}, RatC(1));
    f.set_coeff(MultiIndex{1, 0}, RatC(1));
    f.set_coeff(MultiIndex{0, 1}, RatC(1));
    f.set_coeff(MultiIndex{1, 1}, RatC(3));
    f.set_coeff(MultiIndex{2, 1}, RatC(1));
    auto comps = t_decompose(f, MultiIndex{1, 1});
    REQUIRE(comps.size() >= 2);
    CHECK(comps[0].coeff1(MultiIndex{0, 0}) == RatC(1));
    CHECK(comps[0].coeff1(MultiIndex{1, 0}) == RatC(1));
    CHECK(comps[0].coeff1(MultiIndex{0, 1}) == RatC(1));
    CHECK(comps[0].terms().size() == 3);
    CHECK(comps[1].coeff1(MultiIndex{0, 0}) == RatC(3));
    CHECK(comps[1].coeff1(MultiIndex{1, 0}) == RatC(1));

    TruncatedSeries<RatC> g(2, 12);
    for (int n = 0; n <= 6; ++n) g.set_coeff(MultiIndex{n, n}, RatC(1));
    auto gc = t_decompose(g, MultiIndex{1, 1});
    for (int n = 0; n <= 6; ++n) {
        CHECK(gc[n].coeff1(MultiIndex{0, 0}) == RatC(1));
        CHECK(gc[n].terms().size() == 1);
    }
}

TEST_CASE("t_decompose: Euler series buckets to m! x") {
    // y = sum_{n>=1} (n-1)! eps^{n-1} x^n in variables (x, eps)
    TruncatedSeries<RatC> y(2, 19);
    for (int n = 1; 2 * n - 1 <= 19; ++n) y.set_coeff(MultiIndex{n, n - 1}, RatC(factorial(n - 1)));
    auto comps = t_decompose(y, MultiIndex{1, 1});
    for (size_t m = 0; m + m + 1 <= 19 && m < comps.size(); ++m) {
        CHECK(comps[m].coeff1(MultiIndex{1, 0}) == RatC(factorial(static_cast<int>(m))));
        CHECK(comps[m].terms().size() == 1);
    }
}

TEST_CASE("t_decompose: reassembly and E^alpha membership") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = testutil::random_series<RatC>(rng, 2, 8);
        MultiIndex alpha{1 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 3)};
        auto comps = t_decompose(f, alpha);
        CHECK(t_reassemble(comps, alpha, f.trunc_order()) == f);
        for (const auto& c : comps)
            for (const auto& [beta, v] : c.terms()) CHECK_FALSE(alpha.leq(beta));
    }
}

TEST_CASE("approximate: order-gamma truncation") {
    TruncatedSeries<RatC> f(2, 6);
    f.set_coeff(MultiIndex{0, 0}, RatC(1));
    f.set_coeff(MultiIndex{2, 1}, RatC(1));
    f.set_coeff(MultiIndex{3, 0}, RatC(1));
    CHECK(approximate(f, MultiIndex{0, 0}).empty());
    auto g = approximate(f, MultiIndex{2, 1});
    CHECK(g.coeff1(MultiIndex{0, 0}) == RatC(1));
    CHECK(g.coeff1(MultiIndex{3, 0}) == RatC(1));
    CHECK(g.terms().size() == 2);
}

TEST_CASE("approximate matches partial reassembly (App_{N alpha})") {
    std::mt19937 rng(17);
    MultiIndex alpha{1, 1};
    for (int trial = 0; trial < 6; ++trial) {
        auto f = testutil::random_series<RatC>(rng, 2, 10);
        auto comps = t_decompose(f, alpha);
        for (long N = 1; N <= f.trunc_order() / alpha.degree(); ++N) {
            auto app = approximate(f, alpha.scaled(static_cast<int>(N)));
            std::vector<TruncatedSeries<RatC>> firstN(comps.begin(), comps.begin() + N);
            CHECK(app == t_reassemble(firstN, alpha, f.trunc_order()));
        }
    }

    TruncatedSeries<RatC> geo(2, 10);
    for (int n = 0; n <= 5; ++n) geo.set_coeff(MultiIndex{n, n}, RatC(1));
    auto app2 = approximate(geo, MultiIndex{2, 2});
    CHECK(app2.coeff1(MultiIndex{0, 0}) == RatC(1));
    CHECK(app2.coeff1(MultiIndex{1, 1}) == RatC(1));
    CHECK(app2.terms().size() == 2);
}

TEST_CASE("gevrey_fit: synthetic growth classes") {
    auto make = [](double weight) {
        TruncatedSeries<Cplx> f(2, 40);
        for (int n = 0; n <= 20; ++n) {
            double lf = GammaKernel::log_gamma(n + 1.0);
            f.set_coeff(MultiIndex{n, n}, Cplx(std::exp(weight * lf), 0));
        }
        return f;
    };
    MultiIndex alpha{1, 1};
    CHECK(gevrey_fit(make(1.0), alpha).s_hat == doctest::Approx(1.0).epsilon(0.1));
    CHECK(gevrey_fit(make(0.0), alpha).s_hat == doctest::Approx(0.0).epsilon(0.05));

    TruncatedSeries<Cplx> f2(2, 40);
    for (int n = 0; n <= 20; ++n)
        f2.set_coeff(MultiIndex{n, n}, Cplx(std::exp(GammaKernel::log_gamma(2.0 * n + 1.0)), 0));
    auto fit2 = gevrey_fit(f2, alpha);
    CHECK(std::abs(fit2.s_hat - 2.0) < 0.2);

    TruncatedSeries<Cplx> tiny(2, 4);
    tiny.set_coeff(MultiIndex{1, 1}, Cplx(1));
    CHECK_THROWS(gevrey_fit(tiny, alpha));
}

TEST_CASE("gevrey_fit: s_hat monotone in growth weight") {
    MultiIndex alpha{1, 1};
    double prev = -1.0;
    for (double w : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        TruncatedSeries<Cplx> f(2, 36);
        for (int n = 0; n <= 18; ++n)
            f.set_coeff(MultiIndex{n, n}, Cplx(std::exp(w * GammaKernel::log_gamma(n + 1.0)), 0));
        double s = gevrey_fit(f, alpha).s_hat;
        CHECK(s >= prev - 1e-9);
        prev = s;
    }
}

TEST_CASE("factorial_shell_bounds") {
    auto b1 = factorial_shell_bounds(MultiIndex{4, 4}, MultiIndex{1, 1});
    CHECK(b1.n_min == 4);
    CHECK(b1.lower_min <= 24.0 + 1e-9);
    CHECK(24.0 <= b1.upper_min + 1e-9);

    auto b2 = factorial_shell_bounds(MultiIndex{5, 2}, MultiIndex{2, 1});
    CHECK(b2.n_min == 2);
    CHECK(b2.n_max == 3);
    double minfac = std::min(std::exp(GammaKernel::log_gamma(6.0) / 2.0), 2.0);
    CHECK(b2.upper_min == doctest::Approx(minfac));
    CHECK(b2.lower_min == doctest::Approx(minfac * std::pow(3.0, -7.0)));
    CHECK(b2.lower_min <= 2.0 + 1e-12);
    CHECK(2.0 <= b2.upper_min + 1e-12);
    // chain for N_max! = 3! = 6
    CHECK(b2.lower_max <= 6.0 + 1e-9);
    CHECK(6.0 <= b2.upper_max + 1e-9);

    CHECK_THROWS(factorial_shell_bounds(MultiIndex{0, 0}, MultiIndex{1, 1}));

    // n!^k <= (kn)! <= k^{kn} n!^k at n=3, k=2
    CHECK(36.0 <= 720.0);
    CHECK(720.0 <= std::pow(2.0, 6) * 36.0);
}

TEST_CASE("min/max product inequality on the simplex") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int trial = 0; trial < 500; ++trial) {
        int d = 2 + static_cast<int>(rng() % 3);
        std::vector<double> a(d), t(d);
        double tot = 0;
        double amin = 1e300, amax = 0;
        for (int j = 0; j < d; ++j) {
            a[j] = u(rng);
            t[j] = u(rng);
            tot += t[j];
            amin = std::min(amin, a[j]);
            amax = std::max(amax, a[j]);
        }
        double prod = 1;
        for (int j = 0; j < d; ++j) prod *= std::pow(a[j], t[j] / tot);
        CHECK(amin <= prod * (1 + 1e-12));
        CHECK(prod <= amax * (1 + 1e-12));
    }
}

TEST_CASE("Gamma kernel: factorials and the convexity chain") {
    for (int n = 1; n <= 30; ++n) {
        double g = GammaKernel::gamma(static_cast<double>(n));
        double f = 1.0;
        for (int i = 2; i < n; ++i) f *= i;
        CHECK(std::abs(g - f) / f <= 1e-13);
    }

    std::mt19937 rng(43);
    std::uniform_real_distribution<double> u(1e-6, 50.0);
    for (int trial = 0; trial < 1000; ++trial) {
        double a = u(rng), b = u(rng);
        double lhs = GammaKernel::log_gamma(1 + a) + GammaKernel::log_gamma(1 + b);
        double mid = GammaKernel::log_gamma(1 + a + b);
        double rhs = (a + b) * std::log(2.0) + lhs;
        CHECK(lhs <= mid + 1e-10 * std::abs(mid));
        CHECK(mid <= rhs + 1e-10 * std::abs(rhs));
    }
}
