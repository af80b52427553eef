#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "monosum/io.hpp"
#include "monosum/summation.hpp"
#include "test_util.hpp"

using namespace monosum;

namespace {

const char* kEulerJson = R"({
  "n": 1, "m": 1, "N": 1,
  "alpha": [1], "alpha_prime": [1], "mu": [1],
  "G": { "terms": [
    { "x": [0], "eps": [0], "y": [1], "coef": [[1, 0]] },
    { "x": [1], "eps": [0], "y": [0], "coef": [[-1, 0]] }
  ] }
})";

std::string tmp_path(const std::string& name) {
    return std::string(MONOSUM_TEST_TMP) + "/" + name;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    os << text;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(MONOSUM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("series CSV round trip") {
    std::mt19937 rng(131);
    auto f = testutil::random_series<Cplx>(rng, 3, 6, 2, 0.4);
    std::ostringstream os;
    write_series_csv(os, f, {"x1", "x2", "x3"});
    std::istringstream is(os.str());
    auto g = read_series_csv(is);
    CHECK(g.dim() == 3);
    CHECK(g.ncomp() == 2);
    CHECK(g.trunc_order() == 6);
    CHECK(sub(f, g).max_abs() == 0.0);
}

TEST_CASE("series CSV error paths") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_series_csv(empty), ParseError);
    std::istringstream junk("# trunc=3\nx1,re0,im0\n1,nope,0\n");
    CHECK_THROWS_AS(read_series_csv(junk), ParseError);
    std::istringstream headless("# trunc=3\n");
    CHECK_THROWS_AS(read_series_csv(headless), ParseError);
}

TEST_CASE("Borel CSV carries the offset comment") {
    auto mo = MonomialOrder::balanced(MultiIndex{1, 1}, Rational(1));
    auto f = TruncatedSeries<Cplx>::monomial(MultiIndex{2, 2}, Cplx(1), 6);
    auto g = formal_borel(f, mo);
    std::ostringstream os;
    write_borel_csv(os, g, {"xi1", "xi2"});
    CHECK(os.str().find("# offset=-1,-1") != std::string::npos);
    CHECK(os.str().find("# trunc=6") != std::string::npos);
}

TEST_CASE("problem JSON parsing") {
    std::istringstream is(kEulerJson);
    auto p = read_problem_json(is);
    CHECK(p.n == 1);
    CHECK(p.terms.size() == 2);
    CHECK(p.terms[1].coef[0] == RatC(Rational(-1)));

    std::istringstream bad("{ not json");
    CHECK_THROWS_AS(read_problem_json(bad), ParseError);

    // constant term in G violates G(0,0,0) = 0
    std::istringstream gbad(R"({"n":1,"m":1,"N":1,"alpha":[1],"alpha_prime":[1],"mu":[1],
      "G":{"terms":[{"x":[0],"eps":[0],"y":[0],"coef":[[1,0]]},
                    {"x":[0],"eps":[0],"y":[1],"coef":[[1,0]]}]}})");
    CHECK_THROWS_AS(read_problem_json(gbad), PreconditionError);

    // G independent of y has singular B0
    std::istringstream sing(R"({"n":1,"m":1,"N":1,"alpha":[1],"alpha_prime":[1],"mu":[1],
      "G":{"terms":[{"x":[1],"eps":[0],"y":[0],"coef":[[1,0]]}]}})");
    CHECK_THROWS_AS(read_problem_json(sing), PreconditionError);

    // rational strings parse exactly
    std::istringstream rat(R"({"n":1,"m":1,"N":1,"alpha":[1],"alpha_prime":[1],"mu":["2/3"],
      "G":{"terms":[{"x":[0],"eps":[0],"y":[1],"coef":[["1/3","-0.25"]]}]}})");
    auto q = read_problem_json(rat);
    CHECK(q.mu[0] == Rational(2, 3));
    CHECK(q.terms[0].coef[0] == RatC(Rational(1, 3), Rational(-1, 4)));
}

TEST_CASE("cli solve: Euler rows at order 6") {
    write_file(tmp_path("euler.json"), kEulerJson);
    CHECK(run_cli("solve --problem " + tmp_path("euler.json") + " --order 6 --mode exact --out " +
                  tmp_path("euler6.csv")) == 0);
    std::ifstream is(tmp_path("euler6.csv"));
    auto series = read_series_csv(is);
    double fact = 1.0;
    int rows = 0;
    for (const auto& [beta, v] : series.terms())
        if (std::abs(v(0)) > 0) ++rows;
    CHECK(rows == 6);
    for (int n = 1; n <= 6; ++n) {
        CHECK(series.coeff1(MultiIndex{n, n - 1}).real() == doctest::Approx(fact));
        fact *= n;
    }
}

TEST_CASE("cli solve: trivial problem gives an empty table") {
    write_file(tmp_path("trivial.json"),
               R"({"n":1,"m":1,"N":1,"alpha":[1],"alpha_prime":[1],"mu":[1],
                   "G":{"terms":[{"x":[0],"eps":[0],"y":[1],"coef":[[1,0]]}]}})");
    CHECK(run_cli("solve --problem " + tmp_path("trivial.json") + " --order 5 --out " +
                  tmp_path("trivial.csv")) == 0);
    std::string text = read_file(tmp_path("trivial.csv"));
    // header only, no coefficient rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("cli solve: deterministic output") {
    write_file(tmp_path("euler.json"), kEulerJson);
    run_cli("solve --problem " + tmp_path("euler.json") + " --order 8 --out " + tmp_path("a.csv"));
    run_cli("solve --problem " + tmp_path("euler.json") + " --order 8 --out " + tmp_path("b.csv"));
    CHECK(read_file(tmp_path("a.csv")) == read_file(tmp_path("b.csv")));
    CHECK(!read_file(tmp_path("a.csv")).empty());
}

TEST_CASE("cli: malformed input exits 1, singular B0 exits 2") {
    write_file(tmp_path("broken.json"), "{ nope");
    CHECK(run_cli("solve --problem " + tmp_path("broken.json") + " --order 4") == 1);
    write_file(tmp_path("singular.json"),
               R"({"n":1,"m":1,"N":1,"alpha":[1],"alpha_prime":[1],"mu":[1],
                   "G":{"terms":[{"x":[1],"eps":[0],"y":[0],"coef":[[1,0]]}]}})");
    CHECK(run_cli("solve --problem " + tmp_path("singular.json") + " --order 4") == 2);
    CHECK(run_cli("directions --problem " + tmp_path("singular.json")) == 2);
}

TEST_CASE("cli directions: Euler and diag(1,-1)") {
    write_file(tmp_path("euler.json"), kEulerJson);
    CHECK(run_cli("directions --problem " + tmp_path("euler.json") + " --out " +
                  tmp_path("dirs.json")) == 0);
    auto dirs = nlohmann::json::parse(read_file(tmp_path("dirs.json")));
    REQUIRE(dirs.size() == 1);
    CHECK(std::abs(dirs[0].get<double>()) < 1e-12);

    write_file(tmp_path("diag.json"),
               R"({"n":1,"m":1,"N":2,"alpha":[1],"alpha_prime":[1],"mu":[1],
                   "G":{"terms":[{"x":[0],"eps":[0],"y":[1,0],"coef":[[1,0],[0,0]]},
                                 {"x":[0],"eps":[0],"y":[0,1],"coef":[[0,0],[-1,0]]},
                                 {"x":[1],"eps":[0],"y":[0,0],"coef":[[1,0],[1,0]]}]}})");
    CHECK(run_cli("directions --problem " + tmp_path("diag.json") + " --out " +
                  tmp_path("dirs2.json")) == 0);
    auto dirs2 = nlohmann::json::parse(read_file(tmp_path("dirs2.json")));
    REQUIRE(dirs2.size() == 2);
    CHECK(dirs2[0].get<double>() == doctest::Approx(0.0));
    CHECK(dirs2[1].get<double>() == doctest::Approx(M_PI));
}

TEST_CASE("cli sum: Euler value, singular guard, round trip") {
    write_file(tmp_path("euler.json"), kEulerJson);
    CHECK(run_cli("sum --problem " + tmp_path("euler.json") +
                  " --at x1=1,eps1=-0.1 --direction 3.14159265358979 --tol 1e-8 --out " +
                  tmp_path("sum.json")) == 0);
    auto line = read_file(tmp_path("sum.json"));
    auto res = nlohmann::json::parse(line);
    CHECK(res["value"][0][0].get<double>() == doctest::Approx(0.915633).epsilon(1e-5));
    CHECK(std::abs(res["value"][0][1].get<double>()) < 1e-7);
    CHECK(res["err"].get<double>() >= 0.0);

    // direction 0 is singular for Euler
    CHECK(run_cli("sum --problem " + tmp_path("euler.json") +
                  " --at x1=1,eps1=-0.1 --direction 0") == 3);

    // multiple points evaluate in input order
    CHECK(run_cli("sum --problem " + tmp_path("euler.json") +
                  " --at x1=1,eps1=-0.1 --at x1=1,eps1=-0.2 --direction 3.14159265358979 --out " +
                  tmp_path("sum2.json")) == 0);
    std::istringstream lines(read_file(tmp_path("sum2.json")));
    std::string l1, l2;
    std::getline(lines, l1);
    std::getline(lines, l2);
    CHECK(nlohmann::json::parse(l1)["value"][0][0].get<double>() ==
          doctest::Approx(0.915633).epsilon(1e-4));
    CHECK(nlohmann::json::parse(l2)["value"][0][0].get<double>() ==
          doctest::Approx(0.852111).epsilon(1e-4));
}

TEST_CASE("cli gevrey: fits the solve output without editing") {
    write_file(tmp_path("euler.json"), kEulerJson);
    CHECK(run_cli("solve --problem " + tmp_path("euler.json") + " --order 20 --mode exact --out " +
                  tmp_path("euler20.csv")) == 0);
    CHECK(run_cli("gevrey " + tmp_path("euler20.csv") + " --alpha 1,1 --out " +
                  tmp_path("fit.json")) == 0);
    auto fit = nlohmann::json::parse(read_file(tmp_path("fit.json")));
    CHECK(fit["s"].get<double>() == doctest::Approx(1.0).epsilon(0.15));
    CHECK(fit["r2"].get<double>() > 0.9);

    write_file(tmp_path("empty.csv"), "");
    CHECK(run_cli("gevrey " + tmp_path("empty.csv") + " --alpha 1,1") == 1);
}

TEST_CASE("cli sum: convergent problem matches direct evaluation") {
    // eps x^2 y' = y - x + eps x^2 has the polynomial solution y = x
    write_file(tmp_path("conv.json"),
               R"({"n":1,"m":1,"N":1,"alpha":[1],"alpha_prime":[1],"mu":[1],
                   "G":{"terms":[{"x":[0],"eps":[0],"y":[1],"coef":[[1,0]]},
                                 {"x":[1],"eps":[0],"y":[0],"coef":[[-1,0]]},
                                 {"x":[2],"eps":[1],"y":[0],"coef":[[1,0]]}]}})");
    CHECK(run_cli("sum --problem " + tmp_path("conv.json") +
                  " --at x1=0.7,eps1=-0.3 --direction 2.0 --tol 1e-10 --out " +
                  tmp_path("conv.out")) == 0);
    auto res = nlohmann::json::parse(read_file(tmp_path("conv.out")));
    CHECK(std::abs(res["value"][0][0].get<double>() - 0.7) < 1e-8);
    CHECK(std::abs(res["value"][0][1].get<double>()) < 1e-8);
}

TEST_CASE("cli sum: consumes the solve output and honors exact mode") {
    write_file(tmp_path("euler.json"), kEulerJson);
    CHECK(run_cli("solve --problem " + tmp_path("euler.json") + " --order 26 --out " +
                  tmp_path("euler26.csv")) == 0);
    CHECK(run_cli("sum --problem " + tmp_path("euler.json") + " --series " +
                  tmp_path("euler26.csv") +
                  " --at x1=1,eps1=-0.1 --direction 3.14159265358979 --out " +
                  tmp_path("sum3.json")) == 0);
    auto res = nlohmann::json::parse(read_file(tmp_path("sum3.json")));
    CHECK(res["value"][0][0].get<double>() == doctest::Approx(0.915633).epsilon(1e-5));

    // exact mode works when the Gamma arguments are integral (Euler weights)
    CHECK(run_cli("sum --problem " + tmp_path("euler.json") +
                  " --at x1=1,eps1=-0.1 --direction 3.14159265358979 --mode exact --out " +
                  tmp_path("sum4.json")) == 0);
    auto res4 = nlohmann::json::parse(read_file(tmp_path("sum4.json")));
    CHECK(res4["value"][0][0].get<double>() == doctest::Approx(0.915633).epsilon(1e-5));

    // ... and refuses with a diagnostic when they are not (alpha = 2 gives
    // lambda = 1/2)
    write_file(tmp_path("halfint.json"),
               R"({"n":1,"m":1,"N":1,"alpha":[2],"alpha_prime":[1],"mu":[1],
                   "G":{"terms":[{"x":[0],"eps":[0],"y":[1],"coef":[[1,0]]},
                                 {"x":[1],"eps":[0],"y":[0],"coef":[[-1,0]]}]}})");
    CHECK(run_cli("sum --problem " + tmp_path("halfint.json") +
                  " --at x1=1,eps1=-0.1 --direction 3.14159265358979 --mode exact") == 2);
}
