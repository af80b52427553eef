#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "monosum/analysis.hpp"
#include "monosum/borel.hpp"
#include "monosum/pde.hpp"
#include "monosum/quadrature.hpp"

namespace monosum {

/// Series interchange CSV: a leading `# trunc=T` comment, a header row with
/// the d variable names followed by re0,im0,...,re{N-1},im{N-1}, then one row
/// per term (d exponent columns, 2N value columns). Floats carry 17
/// significant digits and rows follow the deterministic map order.
void write_series_csv(std::ostream& os, const TruncatedSeries<Cplx>& f,
                      const std::vector<std::string>& var_names);

/// Borel-plane variant: adds a `# offset=o1,...,od` comment line (exact
/// rationals) after the truncation comment.
void write_borel_csv(std::ostream& os, const BorelSeries<Cplx>& g,
                     const std::vector<std::string>& var_names);

TruncatedSeries<Cplx> read_series_csv(std::istream& is);

/// Problem file: { "n", "m", "N", "alpha": [...], "alpha_prime": [...],
/// "mu": [...], "G": { "terms": [ { "x": [...], "eps": [...], "y": [...],
/// "coef": [[re,im],...] } ] } }. Numeric entries may be JSON numbers or
/// strings like "1/3" (strings parse decimally exact for the exact mode).
PdeProblem read_problem_json(std::istream& is);
PdeProblem read_problem_file(const std::string& path);

std::string gevrey_fit_json(const GevreyFit& fit);
std::string sum_result_json(const SumResult& result);

/// Default variable names x1..xn, eps1..epsm of a problem's joint space.
std::vector<std::string> joint_var_names(const PdeProblem& p);

std::string format_double(double v);

}  // namespace monosum
