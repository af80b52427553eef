#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "monosum/io.hpp"
#include "monosum/summation.hpp"

using namespace monosum;

namespace {

TruncatedSeries<Cplx> to_numeric(const TruncatedSeries<RatC>& f) {
    TruncatedSeries<Cplx> out(f.dim(), f.trunc_order(), f.ncomp());
    for (const auto& [beta, v] : f.terms()) {
        Eigen::VectorXcd w(f.ncomp());
        bool zero = true;
        for (int c = 0; c < f.ncomp(); ++c) {
            w(c) = to_cplx(v(c));
            if (w(c) != Cplx(0.0, 0.0)) zero = false;
        }
        if (!zero) out.add_to(beta, w);
    }
    return out;
}

std::vector<Cplx> parse_point(const std::string& text, const std::vector<std::string>& names) {
    std::vector<Cplx> point(names.size());
    std::vector<bool> seen(names.size(), false);
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError("--at: expected name=value pairs");
        std::string name = tok.substr(0, eq);
        double value;
        try {
            value = std::stod(tok.substr(eq + 1));
        } catch (const std::exception&) {
            throw ParseError("--at: bad value for " + name);
        }
        bool found = false;
        for (size_t j = 0; j < names.size(); ++j)
            if (names[j] == name) {
                point[j] = Cplx(value, 0.0);
                seen[j] = true;
                found = true;
            }
        if (!found) throw ParseError("--at: unknown variable " + name);
    }
    for (size_t j = 0; j < names.size(); ++j)
        if (!seen[j]) throw ParseError("--at: missing value for " + names[j]);
    return point;
}

std::vector<Rational> parse_weights(const std::string& text, int dim) {
    std::vector<Rational> s;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) s.push_back(parse_rational(tok));
    if (static_cast<int>(s.size()) != dim)
        throw ParseError("--weights: expected " + std::to_string(dim) + " entries");
    return s;
}

MultiIndex parse_alpha(const std::string& text, int dim) {
    std::vector<int> a;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            a.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ParseError("--alpha: bad entry " + tok);
        }
    }
    if (dim > 0 && static_cast<int>(a.size()) != dim)
        throw ParseError("--alpha: expected " + std::to_string(dim) + " entries");
    return MultiIndex(a);
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw ParseError("cannot open output file: " + out_path);
    os << text;
}

struct SumOptions {
    std::string problem_path;
    std::string series_path;
    std::vector<std::string> at;
    double direction = M_PI;
    double tol = 1e-8;
    long order = 24;
    int pade_hint = 0;
    std::string weights;
    std::string mode = "numeric";
    std::string out;
};

int run_sum(const SumOptions& opt) {
    PdeProblem p = read_problem_file(opt.problem_path);
    auto names = joint_var_names(p);

    auto dirs = singular_directions(p);
    for (double th : dirs.directions) {
        double gap = std::abs(std::remainder(opt.direction - th, 2 * M_PI));
        if (gap < 1e-6) throw SingularDirectionError("requested direction is singular");
    }

    MonomialOrder mo = opt.weights.empty()
                           ? p.joint_order()
                           : MonomialOrder(p.joint_order().alpha(), Rational(1),
                                           parse_weights(opt.weights, p.joint_dim()));
    for (int j = 0; j < mo.dim(); ++j)
        if (mo.lambda()[j].get_den() > 64)
            throw ParseError("--weights: lambda denominators must stay <= 64");

    TruncatedSeries<Cplx> series(1, 0);
    if (!opt.series_path.empty()) {
        std::ifstream is(opt.series_path);
        if (!is) throw ParseError("cannot open series file: " + opt.series_path);
        series = read_series_csv(is);
        if (series.dim() != p.joint_dim())
            throw ParseError("--series: variable count does not match the problem");
    } else if (opt.mode == "exact") {
        auto sol = formal_solve<RatC>(p, opt.order, opt.order);
        auto tail = split_summand(sol.series, mo).second;
        formal_borel(tail, mo);  // refuses unless Gamma arguments are integers
        series = to_numeric(sol.series);
    } else {
        series = formal_solve<Cplx>(p, opt.order, opt.order).series;
    }

    std::vector<std::future<SumResult>> jobs;
    for (const auto& at_text : opt.at) {
        auto point = parse_point(at_text, names);
        jobs.push_back(std::async(std::launch::async, [&, point]() {
            return monomial_borel_sum(series, mo, point, opt.direction, opt.tol, opt.pade_hint);
        }));
    }
    std::ostringstream os;
    for (auto& job : jobs) os << sum_result_json(job.get()) << "\n";
    emit(opt.out, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monomial Borel-Laplace summation of singularly perturbed PDE solutions"};
    app.require_subcommand(1);

    std::string problem_path, out_path, mode = "numeric";
    long order = 16;

    auto* solve = app.add_subcommand("solve", "compute the formal power series solution");
    solve->add_option("--problem", problem_path)->required();
    solve->add_option("--order", order)->check(CLI::Range(1L, 1000000L));
    solve->add_option("--mode", mode)->check(CLI::IsMember({"exact", "numeric"}));
    solve->add_option("--out", out_path);

    auto* directions = app.add_subcommand("directions", "list the singular directions");
    directions->add_option("--problem", problem_path)->required();
    directions->add_option("--out", out_path);

    SumOptions sum_opt;
    auto* sum = app.add_subcommand("sum", "numeric Borel sum at evaluation points");
    sum->add_option("--problem", sum_opt.problem_path)->required();
    sum->add_option("--series", sum_opt.series_path, "precomputed coefficients CSV (skips solve)");
    sum->add_option("--at", sum_opt.at, "evaluation point, e.g. x1=1,eps1=-0.1")->required();
    sum->add_option("--direction", sum_opt.direction);
    sum->add_option("--tol", sum_opt.tol)->check(CLI::Range(1e-300, 1e-2));
    sum->add_option("--order", sum_opt.order)->check(CLI::Range(1L, 1000000L));
    sum->add_option("--pade", sum_opt.pade_hint);
    sum->add_option("--weights", sum_opt.weights);
    sum->add_option("--mode", sum_opt.mode)->check(CLI::IsMember({"exact", "numeric"}));
    sum->add_option("--out", sum_opt.out);

    std::string series_path, alpha_text;
    auto* gevrey = app.add_subcommand("gevrey", "fit the Gevrey order of a series CSV");
    gevrey->add_option("series", series_path, "series CSV file")->required();
    gevrey->add_option("--alpha", alpha_text)->required();
    gevrey->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    try {
        if (*solve) {
            PdeProblem p = read_problem_file(problem_path);
            TruncatedSeries<Cplx> series(1, 0);
            if (mode == "exact")
                series = to_numeric(formal_solve<RatC>(p, order, order).series);
            else
                series = formal_solve<Cplx>(p, order, order).series;
            std::ostringstream os;
            write_series_csv(os, series, joint_var_names(p));
            emit(out_path, os.str());
        } else if (*directions) {
            PdeProblem p = read_problem_file(problem_path);
            auto dirs = singular_directions(p);
            std::ostringstream os;
            os << "[";
            for (size_t i = 0; i < dirs.directions.size(); ++i)
                os << (i ? ", " : "") << format_double(dirs.directions[i]);
            os << "]\n";
            emit(out_path, os.str());
        } else if (*sum) {
            return run_sum(sum_opt);
        } else if (*gevrey) {
            std::ifstream is(series_path);
            if (!is) throw ParseError("cannot open series file: " + series_path);
            auto series = read_series_csv(is);
            auto fit = gevrey_fit(series, parse_alpha(alpha_text, series.dim()));
            emit(out_path, gevrey_fit_json(fit) + "\n");
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ExactModeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SingularDirectionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
