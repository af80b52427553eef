#include "monosum/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "monosum/errors.hpp"

namespace monosum {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

Rational json_rational(const nlohmann::json& v, const char* what) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long>());
        if (v.is_number_float()) {
            Rational q;
            mpq_set_d(q.get_mpq_t(), v.get<double>());
            return q;
        }
    } catch (const std::exception&) {
    }
    throw ParseError(std::string("problem file: bad numeric value for ") + what);
}

MultiIndex json_exponents(const nlohmann::json& v, int dim, const char* what) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        throw ParseError(std::string("problem file: ") + what + " must be an array of length " +
                         std::to_string(dim));
    std::vector<int> e;
    for (const auto& x : v) {
        if (!x.is_number_integer() || x.get<long>() < 0)
            throw ParseError(std::string("problem file: ") + what + " entries must be integers >= 0");
        e.push_back(static_cast<int>(x.get<long>()));
    }
    return MultiIndex(e);
}

}  // namespace

void write_series_csv(std::ostream& os, const TruncatedSeries<Cplx>& f,
                      const std::vector<std::string>& var_names) {
    if (static_cast<int>(var_names.size()) != f.dim())
        throw std::invalid_argument("write_series_csv: name count mismatch");
    os << "# trunc=" << f.trunc_order() << "\n";
    for (int j = 0; j < f.dim(); ++j) os << (j ? "," : "") << var_names[j];
    for (int c = 0; c < f.ncomp(); ++c) os << ",re" << c << ",im" << c;
    os << "\n";
    for (const auto& [beta, v] : f.terms()) {
        bool zero = true;
        for (int c = 0; c < f.ncomp() && zero; ++c)
            if (v(c) != Cplx(0.0, 0.0)) zero = false;
        if (zero) continue;
        for (int j = 0; j < f.dim(); ++j) os << (j ? "," : "") << beta[j];
        for (int c = 0; c < f.ncomp(); ++c)
            os << ',' << format_double(v(c).real()) << ',' << format_double(v(c).imag());
        os << "\n";
    }
}

void write_borel_csv(std::ostream& os, const BorelSeries<Cplx>& g,
                     const std::vector<std::string>& var_names) {
    os << "# trunc=" << g.body.trunc_order() << "\n";
    os << "# offset=";
    for (int j = 0; j < g.mo.dim(); ++j) os << (j ? "," : "") << g.offset[j].get_str();
    os << "\n";
    std::ostringstream body;
    write_series_csv(body, g.body, var_names);
    std::string text = body.str();
    os << text.substr(text.find('\n') + 1);  // body text minus its trunc comment
}

TruncatedSeries<Cplx> read_series_csv(std::istream& is) {
    std::string line;
    long trunc = -1;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("trunc=");
            if (pos != std::string::npos) {
                try {
                    trunc = std::stol(line.substr(pos + 6));
                } catch (const std::exception&) {
                    throw ParseError("series CSV: malformed trunc comment");
                }
            }
            continue;
        }
        if (header.empty())
            header = split_csv_line(line);
        else
            rows.push_back(split_csv_line(line));
    }
    if (header.empty()) throw ParseError("series CSV: missing header row");
    int d = 0;
    while (d < static_cast<int>(header.size()) && header[d].rfind("re", 0) != 0) ++d;
    if (d == 0 || d == static_cast<int>(header.size()))
        throw ParseError("series CSV: header must list variables then re/im columns");
    int ncols = static_cast<int>(header.size()) - d;
    if (ncols % 2 != 0) throw ParseError("series CSV: unpaired re/im columns");
    int ncomp = ncols / 2;

    long maxdeg = 0;
    std::vector<std::pair<MultiIndex, Eigen::VectorXcd>> parsed;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != d + 2 * ncomp)
            throw ParseError("series CSV: wrong column count in a data row");
        std::vector<int> e(d);
        try {
            for (int j = 0; j < d; ++j) e[j] = std::stoi(row[j]);
            Eigen::VectorXcd v(ncomp);
            for (int c = 0; c < ncomp; ++c)
                v(c) = Cplx(std::stod(row[d + 2 * c]), std::stod(row[d + 2 * c + 1]));
            MultiIndex beta(e);
            maxdeg = std::max(maxdeg, beta.degree());
            parsed.emplace_back(std::move(beta), std::move(v));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("series CSV: malformed data row");
        }
    }
    if (parsed.empty()) throw ParseError("series CSV: no coefficient rows");
    TruncatedSeries<Cplx> f(d, trunc >= 0 ? trunc : maxdeg, ncomp);
    for (auto& [beta, v] : parsed) f.add_to(beta, v);
    return f;
}

PdeProblem read_problem_json(std::istream& is) {
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("problem file: invalid JSON: ") + e.what());
    }
    PdeProblem p;
    try {
        p.n = j.at("n").get<int>();
        p.m = j.at("m").get<int>();
        p.N = j.at("N").get<int>();
    } catch (const std::exception&) {
        throw ParseError("problem file: n, m, N must be integers");
    }
    if (p.n < 1 || p.m < 1 || p.N < 1) throw ParseError("problem file: n, m, N must be >= 1");
    p.alpha = json_exponents(j.value("alpha", nlohmann::json::array()), p.n, "alpha");
    p.alpha_prime = json_exponents(j.value("alpha_prime", nlohmann::json::array()), p.m, "alpha_prime");
    if (!p.alpha.all_positive() || !p.alpha_prime.all_positive())
        throw ParseError("problem file: alpha entries must be >= 1");
    const auto& muj = j.at("mu");
    if (!muj.is_array() || static_cast<int>(muj.size()) != p.n)
        throw ParseError("problem file: mu must be an array of length n");
    for (const auto& v : muj) p.mu.push_back(json_rational(v, "mu"));
    if (!j.contains("G") || !j["G"].contains("terms") || !j["G"]["terms"].is_array())
        throw ParseError("problem file: missing G.terms array");
    for (const auto& tj : j["G"]["terms"]) {
        GTerm t;
        t.x = json_exponents(tj.value("x", nlohmann::json::array()), p.n, "term x");
        t.eps = json_exponents(tj.value("eps", nlohmann::json::array()), p.m, "term eps");
        MultiIndex ypow = json_exponents(tj.value("y", nlohmann::json::array()), p.N, "term y");
        for (int c = 0; c < p.N; ++c) t.ypow.push_back(ypow[c]);
        const auto& cj = tj.at("coef");
        if (!cj.is_array() || static_cast<int>(cj.size()) != p.N)
            throw ParseError("problem file: coef must be an array of N [re,im] pairs");
        for (const auto& pair : cj) {
            if (!pair.is_array() || pair.size() != 2)
                throw ParseError("problem file: coef entries must be [re,im] pairs");
            t.coef.emplace_back(json_rational(pair[0], "coef"), json_rational(pair[1], "coef"));
        }
        p.terms.push_back(std::move(t));
    }
    p.validate();
    return p;
}

PdeProblem read_problem_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open problem file: " + path);
    return read_problem_json(is);
}

std::string gevrey_fit_json(const GevreyFit& fit) {
    std::ostringstream os;
    os << "{ \"s\": " << format_double(fit.s_hat) << ", \"C\": " << format_double(fit.C)
       << ", \"A\": " << format_double(fit.A) << ", \"r2\": " << format_double(fit.r2) << " }";
    return os.str();
}

std::string sum_result_json(const SumResult& result) {
    std::ostringstream os;
    os << "{ \"value\": [";
    for (int c = 0; c < result.value.size(); ++c) {
        os << (c ? ", " : "") << '[' << format_double(result.value(c).real()) << ", "
           << format_double(result.value(c).imag()) << ']';
    }
    os << "], \"direction\": " << format_double(result.direction)
       << ", \"err\": " << format_double(result.quadrature_error_estimate) << ", \"poles\": [";
    for (size_t i = 0; i < result.pade_pole_locations.size(); ++i) {
        const Cplx& p = result.pade_pole_locations[i];
        os << (i ? ", " : "") << '[' << format_double(p.real()) << ", " << format_double(p.imag())
           << ']';
    }
    os << "] }";
    return os.str();
}

std::vector<std::string> joint_var_names(const PdeProblem& p) {
    std::vector<std::string> names;
    for (int j = 1; j <= p.n; ++j) names.push_back("x" + std::to_string(j));
    for (int j = 1; j <= p.m; ++j) names.push_back("eps" + std::to_string(j));
    return names;
}

}  // namespace monosum
