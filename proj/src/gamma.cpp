#include "monosum/gamma.hpp"

#include <cmath>

namespace monosum {

namespace {

// Lanczos g = 7, 9 coefficients (Godfrey's set). Partial fractions are
// accumulated in long double to hold the relative error near 1e-15 on (0, 50].
constexpr long double kLanczos[9] = {
    0.99999999999980993227684700473478L,
    676.520368121885098567009190444019L,
    -1259.13921672240287047156078755283L,
    771.3234287776530788486528258894L,
    -176.61502916214059906584551354L,
    12.507343278686904814458936853L,
    -0.13857109526572011689554707L,
    9.984369578019570859563e-6L,
    1.50563273514931155834e-7L};

constexpr long double kLogSqrt2Pi = 0.91893853320467274178032973640562L;

}  // namespace

double GammaKernel::log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("GammaKernel: argument must be positive");
    // Upward recurrence keeps the Lanczos core argument above 1.
    long double shift = 0.0L;
    long double z = x;
    while (z < 1.0L) {
        shift -= std::log(z);
        z += 1.0L;
    }
    long double zm1 = z - 1.0L;
    long double sum = kLanczos[0];
    for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (zm1 + i);
    long double t = zm1 + 7.5L;
    long double lg = kLogSqrt2Pi + (zm1 + 0.5L) * std::log(t) - t + std::log(sum);
    return static_cast<double>(lg + shift);
}

double GammaKernel::gamma(double x) { return std::exp(log_gamma(x)); }

Rational gamma_exact(const Rational& q) {
    if (!is_integer(q) || q <= 0)
        throw ExactModeError("exact mode requires integer Gamma arguments, got " + q.get_str());
    unsigned long n = q.get_num().get_ui();
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n - 1);
    return Rational(f);
}

}  // namespace monosum
