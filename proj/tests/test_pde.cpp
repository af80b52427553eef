#include <random>

#include "doctest.h"

#include "monosum/pde.hpp"
#include "test_util.hpp"

using namespace monosum;

namespace {

GTerm term(std::initializer_list<int> x, std::initializer_list<int> eps, std::vector<int> ypow,
           std::vector<RatC> coef) {
    GTerm t;
    t.x = MultiIndex(x);
    t.eps = MultiIndex(eps);
    t.ypow = std::move(ypow);
    t.coef = std::move(coef);
    return t;
}

/// eps x^2 dy/dx = y - x, the classical Euler equation.
PdeProblem euler_problem() {
    PdeProblem p;
    p.n = p.m = p.N = 1;
    p.alpha = MultiIndex{1};
    p.alpha_prime = MultiIndex{1};
    p.mu = {Rational(1)};
    p.terms.push_back(term({0}, {0}, {1}, {RatC(1)}));
    p.terms.push_back(term({1}, {0}, {0}, {RatC(Rational(-1))}));
    return p;
}

/// eps x^2 dy/dx = y - x + y^2.
PdeProblem nonlinear_problem() {
    PdeProblem p = euler_problem();
    p.terms.push_back(term({0}, {0}, {2}, {RatC(1)}));
    return p;
}

Rational factorial(int n) {
    Rational f(1);
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

TEST_CASE("normalization: weights and kappa") {
    auto p = euler_problem();
    CHECK(p.kappa() == Rational(1));
    CHECK(p.joint_weights() == std::vector<Rational>{Rational(1), Rational(0)});

    PdeProblem q = p;
    q.mu = {Rational(2)};
    q.alpha = MultiIndex{3};
    CHECK(q.kappa() == Rational(6));
    CHECK(q.joint_weights()[0] == Rational(1));

    PdeProblem r;
    r.n = 2;
    r.m = 1;
    r.N = 1;
    r.alpha = MultiIndex{1, 1};
    r.alpha_prime = MultiIndex{1};
    r.mu = {Rational(1), Rational(1)};
    r.terms.push_back(term({0, 0}, {0}, {1}, {RatC(1)}));
    CHECK(r.kappa() == Rational(2));
    CHECK(r.joint_weights() == std::vector<Rational>{Rational(1, 2), Rational(1, 2), Rational(0)});

    // F = G / kappa and A0 = B0 / kappa
    auto F = normalize<RatC>(r, 8);
    CHECK(F.A0(0, 0) == RatC(Rational(1, 2)));
    CHECK(F.kappa == Rational(2));
}

TEST_CASE("solve_y0: implicit function branch") {
    // F(0,eps,y) = y - eps  ->  y0 = eps
    PdeProblem p;
    p.n = p.m = p.N = 1;
    p.alpha = MultiIndex{1};
    p.alpha_prime = MultiIndex{1};
    p.mu = {Rational(1)};
    p.terms.push_back(term({0}, {0}, {1}, {RatC(1)}));
    p.terms.push_back(term({0}, {1}, {0}, {RatC(Rational(-1))}));
    auto y0 = solve_y0<RatC>(p, 6);
    CHECK(y0.coeff1(MultiIndex{0, 1}) == RatC(Rational(1)));
    int nonzero = 0;
    for (const auto& [beta, v] : y0.terms())
        if (!v(0).is_zero()) ++nonzero;
    CHECK(nonzero == 1);

    // F = y - eps + y^2: alternating Catalan numbers, checked against the
    // direct Lagrange-inversion recurrence c_k = -sum_{i+j=k} c_i c_j
    PdeProblem q = p;
    q.terms.push_back(term({0}, {0}, {2}, {RatC(1)}));
    const int M = 10;
    auto y0q = solve_y0<RatC>(q, M);
    std::vector<Rational> c(M + 1, Rational(0));
    c[1] = 1;
    for (int k = 2; k <= M; ++k)
        for (int i = 1; i < k; ++i) c[k] -= c[i] * c[k - i];
    for (int k = 1; k <= M; ++k) CHECK(y0q.coeff1(MultiIndex{0, k}) == RatC(c[k]));
    CHECK(y0q.coeff1(MultiIndex{0, 4}) == RatC(Rational(-5)));

    // F = 2y  ->  y0 = 0
    PdeProblem z;
    z.n = z.m = z.N = 1;
    z.alpha = MultiIndex{1};
    z.alpha_prime = MultiIndex{1};
    z.mu = {Rational(1)};
    z.terms.push_back(term({0}, {0}, {1}, {RatC(2)}));
    CHECK(solve_y0<RatC>(z, 6).max_abs() == 0.0);
}

TEST_CASE("formal_solve: Euler coefficients (n-1)!") {
    auto p = euler_problem();
    auto sol = formal_solve<RatC>(p, 20, 19);
    for (int n = 1; n <= 20; ++n) {
        CHECK(sol.series.coeff1(MultiIndex{n, n - 1}) == RatC(factorial(n - 1)));
    }
    int nonzero = 0;
    for (const auto& [beta, v] : sol.series.terms())
        if (!v(0).is_zero()) ++nonzero;
    CHECK(nonzero == 20);
}

TEST_CASE("formal_solve: low order and trivial cases") {
    auto sol = formal_solve<RatC>(euler_problem(), 2, 2);
    CHECK(sol.series.coeff1(MultiIndex{1, 0}) == RatC(1));
    CHECK(sol.series.coeff1(MultiIndex{2, 1}) == RatC(1));

    PdeProblem z;
    z.n = z.m = z.N = 1;
    z.alpha = MultiIndex{1};
    z.alpha_prime = MultiIndex{1};
    z.mu = {Rational(1)};
    z.terms.push_back(term({0}, {0}, {1}, {RatC(1)}));
    CHECK(formal_solve<RatC>(z, 6, 6).series.max_abs() == 0.0);
}

TEST_CASE("formal_solve: deterministic under table permutation") {
    auto p = nonlinear_problem();
    PdeProblem q = p;
    std::reverse(q.terms.begin(), q.terms.end());
    auto a = formal_solve<RatC>(p, 8, 8);
    auto b = formal_solve<RatC>(q, 8, 8);
    CHECK(a.series == b.series);
}

TEST_CASE("pde residual vanishes exactly on the resolved box") {
    CHECK(pde_residual_max(euler_problem(), formal_solve<RatC>(euler_problem(), 10, 10)) == 0.0);
    CHECK(pde_residual_max(nonlinear_problem(), formal_solve<RatC>(nonlinear_problem(), 10, 10)) ==
          0.0);
}

TEST_CASE("formal solution is 1-Gevrey in the joint monomial") {
    auto sol = formal_solve<Cplx>(euler_problem(), 20, 19);
    auto fit = gevrey_fit(sol.series, MultiIndex{1, 1});
    CHECK(std::abs(fit.s_hat - 1.0) < 0.15);
}

TEST_CASE("singular_directions") {
    auto euler = singular_directions(euler_problem());
    REQUIRE(euler.directions.size() == 1);
    CHECK(euler.directions[0] == doctest::Approx(0.0).epsilon(1e-10));

    PdeProblem diag;
    diag.n = diag.m = 1;
    diag.N = 2;
    diag.alpha = MultiIndex{1};
    diag.alpha_prime = MultiIndex{1};
    diag.mu = {Rational(1)};
    diag.terms.push_back(term({0}, {0}, {1, 0}, {RatC(1), RatC()}));
    diag.terms.push_back(term({0}, {0}, {0, 1}, {RatC(), RatC(Rational(-1))}));
    diag.terms.push_back(term({1}, {0}, {0, 0}, {RatC(1), RatC(1)}));
    auto dd = singular_directions(diag);
    REQUIRE(dd.directions.size() == 2);
    CHECK(dd.directions[0] == doctest::Approx(0.0));
    CHECK(dd.directions[1] == doctest::Approx(M_PI));

    // rotation matrix [[0,1],[-1,0]], eigenvalues +-i
    PdeProblem rot = diag;
    rot.terms.clear();
    rot.terms.push_back(term({0}, {0}, {0, 1}, {RatC(1), RatC()}));
    rot.terms.push_back(term({0}, {0}, {1, 0}, {RatC(), RatC(Rational(-1))}));
    rot.terms.push_back(term({1}, {0}, {0, 0}, {RatC(1), RatC(1)}));
    auto rd = singular_directions(rot);
    REQUIRE(rd.directions.size() == 2);
    CHECK(rd.directions[0] == doctest::Approx(M_PI / 2));
    CHECK(rd.directions[1] == doctest::Approx(3 * M_PI / 2));

    // eigenvalues 2 e^{+-i pi/3}: companion of t^2 - 2t + 4
    PdeProblem comp = diag;
    comp.terms.clear();
    comp.terms.push_back(term({0}, {0}, {1, 0}, {RatC(), RatC(1)}));
    comp.terms.push_back(term({0}, {0}, {0, 1}, {RatC(Rational(-4)), RatC(2)}));
    comp.terms.push_back(term({1}, {0}, {0, 0}, {RatC(1), RatC(1)}));
    auto cd = singular_directions(comp);
    REQUIRE(cd.directions.size() == 2);
    CHECK(cd.directions[0] == doctest::Approx(M_PI / 3));
    CHECK(cd.directions[1] == doctest::Approx(5 * M_PI / 3));

    // rescaling G by a positive constant leaves the directions unchanged
    PdeProblem scaled = rot;
    for (auto& t : scaled.terms)
        for (auto& c : t.coef) c *= RatC(3);
    auto sd = singular_directions(scaled);
    REQUIRE(sd.directions.size() == 2);
    CHECK(sd.directions[0] == doctest::Approx(rd.directions[0]));
    CHECK(sd.directions[1] == doctest::Approx(rd.directions[1]));

    // reported condition number of B0
    CHECK(diag.b0_condition() == doctest::Approx(1.0));

    // singular B0 is rejected
    PdeProblem bad;
    bad.n = bad.m = bad.N = 1;
    bad.alpha = MultiIndex{1};
    bad.alpha_prime = MultiIndex{1};
    bad.mu = {Rational(1)};
    bad.terms.push_back(term({1}, {0}, {0}, {RatC(1)}));
    CHECK_THROWS_AS(singular_directions(bad), PreconditionError);
}

TEST_CASE("convolution equation: exact residual zero") {
    CHECK(ce_residual_formal<RatC>(euler_problem(), 12) == 0.0);
    CHECK(ce_residual_formal<RatC>(nonlinear_problem(), 10) == 0.0);

    PdeProblem z;
    z.n = z.m = z.N = 1;
    z.alpha = MultiIndex{1};
    z.alpha_prime = MultiIndex{1};
    z.mu = {Rational(1)};
    z.terms.push_back(term({0}, {0}, {1}, {RatC(1)}));
    CHECK(ce_residual_formal<RatC>(z, 8) == 0.0);
}

TEST_CASE("convolution equation: rhs at Y = 0 is the Borel forcing") {
    CeSystem<RatC> ce(euler_problem(), 10);
    std::vector<BorelSeries<RatC>> zero;
    zero.emplace_back(TruncatedSeries<RatC>::zero(2, 10), ce.mo());
    auto r = ce.rhs(zero);
    auto bc = formal_borel(ce.c().component(0), ce.mo());
    CHECK(sub(r[0].body, bc.body).max_abs() == 0.0);
}

TEST_CASE("companion_system") {
    HigherOrderProblem hop;
    hop.n = hop.m = hop.N = 1;
    hop.l = 2;
    hop.alpha = MultiIndex{1};
    hop.alpha_prime = MultiIndex{1};
    hop.mu = {Rational(1)};
    hop.b = {RatC()};
    hop.terms.push_back(term({0}, {0}, {1}, {RatC(1)}));
    hop.terms.push_back(term({1}, {0}, {0}, {RatC(Rational(-1))}));

    auto sys = companion_system(hop);
    CHECK(sys.N == 2);
    sys.validate();
    // block 0: y_1; block 1: F(x,eps,y_0) = y_0 - x
    auto F = detail::normalized_rhs<RatC>(sys, 6);
    CHECK(F.A0(0, 1) == RatC(1));
    CHECK(F.A0(1, 0) == RatC(1));
    CHECK(F.A0(0, 0) == RatC());
    CHECK(F.A0(1, 1) == RatC());

    // with damping b1 = a: the verbatim display couples a to y_0, the
    // shifted variant to y_1
    hop.b = {RatC(Rational(3))};
    auto damped = companion_system(hop, false);
    auto Fd = detail::normalized_rhs<RatC>(damped, 6);
    CHECK(Fd.A0(1, 0) == RatC(1) - RatC(Rational(3)));
    CHECK(Fd.A0(1, 1) == RatC());
    auto shifted = companion_system(hop, true);
    auto Fs = detail::normalized_rhs<RatC>(shifted, 6);
    CHECK(Fs.A0(1, 0) == RatC(1));
    CHECK(Fs.A0(1, 1) == RatC(Rational(-3)));

    // l = 3, all b zero: nilpotent chain with F in the last slot
    hop.l = 3;
    hop.b = {RatC(), RatC()};
    auto chain = companion_system(hop);
    CHECK(chain.N == 3);
    auto Fc = detail::normalized_rhs<RatC>(chain, 6);
    CHECK(Fc.A0(0, 1) == RatC(1));
    CHECK(Fc.A0(1, 2) == RatC(1));
    CHECK(Fc.A0(2, 0) == RatC(1));
    CHECK(Fc.A0(0, 0) == RatC());
    CHECK(Fc.A0(2, 2) == RatC());
    chain.validate();
}

TEST_CASE("nagumo_norm: basics and majorant inequalities") {
    // f = x, l = 0, r = 1: sup |x| = 1 (grid resolution limited)
    TruncatedSeries<Cplx> x(1, 6);
    x.set_coeff(MultiIndex{1}, Cplx(1));
    CHECK(nagumo_norm(x, 1, 0, 1.0) == doctest::Approx(1.0).epsilon(0.02));

    // derivative bound: ||1||_1 = sup (1-|x|) = 1 <= e * 1 * 1
    TruncatedSeries<Cplx> one(1, 6);
    one.set_coeff(MultiIndex{0}, Cplx(1));
    double n1 = nagumo_norm(one, 1, 1, 1.0);
    CHECK(n1 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(n1 <= std::exp(1.0) * nagumo_norm(x, 1, 0, 1.0) + 1e-12);

    // constant C: ||C||_l = C r^{nl}
    TruncatedSeries<Cplx> c(2, 4);
    c.set_coeff(MultiIndex{0, 0}, Cplx(5));
    CHECK(nagumo_norm(c, 2, 2, 1.5) == doctest::Approx(5 * std::pow(1.5, 4)).epsilon(0.05));

    std::mt19937 rng(97);
    const double r = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(rng() % 2);
        auto f = testutil::random_series<Cplx>(rng, n, 5, 1, 0.6);
        auto g = testutil::random_series<Cplx>(rng, n, 5, 1, 0.6);
        int l = static_cast<int>(rng() % 3), k = static_cast<int>(rng() % 3);
        auto fg = mul(f.with_trunc(10), g.with_trunc(10));
        CHECK(nagumo_norm(fg, n, l + k, r) <=
              nagumo_norm(f, n, l, r) * nagumo_norm(g, n, k, r) * (1 + 1e-9));
        for (int j = 0; j < n; ++j) {
            auto df = derivative(f, MultiIndex::unit(n, j));
            CHECK(nagumo_norm(df, n, l + 1, r) <=
                  std::exp(1.0) * (l + 1) * std::pow(r, n - 1) * nagumo_norm(f, n, l, r) * (1 + 1e-9));
        }
    }

    CHECK_THROWS(nagumo_norm(x, 1, 0, -1.0));
}

TEST_CASE("exact mode refuses non-integer Gamma arguments") {
    // balanced weights on (1,1) with k=1 give lambda = (1/2,1/2): odd-degree
    // monomials hit Gamma at half-integers
    auto mo = MonomialOrder::balanced(MultiIndex{1, 1}, Rational(1));
    auto f = TruncatedSeries<RatC>::monomial(MultiIndex{2, 1}, RatC(1), 6);
    CHECK_THROWS_AS(formal_borel(f, mo), ExactModeError);
}
