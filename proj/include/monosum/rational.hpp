#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace monosum {

using Rational = mpq_class;
using Cplx = std::complex<double>;

inline double to_double(const Rational& q) { return q.get_d(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Floor of a rational as a machine integer.
inline long rat_floor(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    if (!f.fits_slong_p()) throw std::overflow_error("rat_floor: value out of range");
    return f.get_si();
}

/// Parse "p/q", "p", or a plain decimal like "-0.125" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    std::string s = text;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational q(s, 10);  // explicit base, or GMP treats leading zeros as octal
        q.canonicalize();
        return q;
    }
    auto dot = s.find('.');
    auto epos = s.find_first_of("eE");
    long exp10 = 0;
    if (epos != std::string::npos) {
        exp10 = std::stol(s.substr(epos + 1));
        s = s.substr(0, epos);
        dot = s.find('.');
    }
    if (dot != std::string::npos) {
        exp10 -= static_cast<long>(s.size() - dot - 1);
        s.erase(dot, 1);
    }
    if (s.empty() || s == "-" || s == "+") throw std::invalid_argument("parse_rational: '" + text + "'");
    Rational q(s, 10);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    if (exp10 >= 0) q *= p10; else q /= Rational(p10);
    q.canonicalize();
    return q;
}

/// Complex number with exact rational parts; the scalar of the exact mode.
struct RatC {
    Rational re{0}, im{0};

    RatC() = default;
    RatC(const Rational& r) : re(r) {}
    RatC(const Rational& r, const Rational& i) : re(r), im(i) {}
    RatC(long v) : re(v) {}
    RatC(int v) : re(v) {}

    bool is_zero() const { return re == 0 && im == 0; }

    RatC& operator+=(const RatC& o) { re += o.re; im += o.im; return *this; }
    RatC& operator-=(const RatC& o) { re -= o.re; im -= o.im; return *this; }
    friend RatC operator+(RatC a, const RatC& b) { a += b; return a; }
    friend RatC operator-(RatC a, const RatC& b) { a -= b; return a; }
    friend RatC operator-(const RatC& a) { return RatC(-a.re, -a.im); }
    friend RatC operator*(const RatC& a, const RatC& b) {
        return RatC(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    RatC& operator*=(const RatC& o) { *this = *this * o; return *this; }
    friend RatC operator/(const RatC& a, const RatC& b) {
        Rational n = b.re * b.re + b.im * b.im;
        if (n == 0) throw std::domain_error("RatC: division by zero");
        return RatC((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
    }
    RatC& operator/=(const RatC& o) { *this = *this / o; return *this; }
    friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const RatC& a, const RatC& b) { return !(a == b); }
};

inline Cplx to_cplx(const RatC& v) { return Cplx(to_double(v.re), to_double(v.im)); }

// Scalar abstraction shared by the numeric (complex double) and exact
// (complex rational) instantiations of the series machinery.
template <class S> struct scalar_traits;

template <> struct scalar_traits<Cplx> {
    static constexpr bool exact = false;
    static Cplx zero() { return {0.0, 0.0}; }
    static Cplx one() { return {1.0, 0.0}; }
    static Cplx from_ratc(const RatC& v) { return to_cplx(v); }
    static Cplx from_rational(const Rational& q) { return Cplx(to_double(q), 0.0); }
    static double abs_value(const Cplx& v) { return std::abs(v); }
    static bool is_zero(const Cplx& v) { return v.real() == 0.0 && v.imag() == 0.0; }
};

template <> struct scalar_traits<RatC> {
    static constexpr bool exact = true;
    static RatC zero() { return RatC(); }
    static RatC one() { return RatC(Rational(1)); }
    static RatC from_ratc(const RatC& v) { return v; }
    static RatC from_rational(const Rational& q) { return RatC(q); }
    static double abs_value(const RatC& v) {
        return std::abs(to_double(v.re)) + std::abs(to_double(v.im));
    }
    static bool is_zero(const RatC& v) { return v.is_zero(); }
};

}  // namespace monosum

// Minimal Eigen glue so Matrix<RatC, ...> supports the coefficientwise
// arithmetic used here (no norms, no decompositions on exact scalars).
#include <Eigen/Core>

namespace Eigen {
template <> struct NumTraits<monosum::RatC> {
    using Real = monosum::RatC;
    using NonInteger = monosum::RatC;
    using Literal = monosum::RatC;
    using Nested = monosum::RatC;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 40,
        MulCost = 80
    };
    static inline Real epsilon() { return monosum::RatC(); }
    static inline Real dummy_precision() { return monosum::RatC(); }
    static inline int digits10() { return 0; }
};
}  // namespace Eigen
