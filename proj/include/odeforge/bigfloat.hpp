#pragma once

// Arbitrary precision reals carrying a pessimistic absolute error bound.
// The bound is kept as log10 so it can go far below double range.

#include <string>

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

#include "odeforge/errors.hpp"
#include "odeforge/poly.hpp"

namespace odeforge {

using mpfr_float = boost::multiprecision::mpfr_float;

// Working precision in decimal digits for BigFloat arithmetic on this
// thread; the MPFR default precision is process wide, so jobs that use
// BigFloat run one precision at a time.
unsigned working_digits();

class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_digits_;
    unsigned saved_mpfr_;
};

class BigFloat {
public:
    BigFloat();  // exact zero
    BigFloat(const mpfr_float& v, double log10_err);
    BigFloat(long v);  // exact when it fits the working precision
    explicit BigFloat(const mpq_class& q);
    explicit BigFloat(const mpz_class& z);

    // "1.2345@4": value then achieved relative digits
    static BigFloat parse(const std::string& text);
    static BigFloat pi();

    const mpfr_float& value() const { return v_; }
    double log10_error() const { return lerr_; }
    bool exact() const;
    // relative decimal digits guaranteed by the error bound
    double digits() const;
    double log10_abs() const;
    std::string str() const;          // decimal@digits
    std::string str(int max_digits) const;
    double to_double() const { return v_.convert_to<double>(); }
    mpq_class to_mpq() const;  // exact binary value, error ignored

    // plus an extra absolute error, e.g. a truncation bound
    BigFloat widened(double log10_extra) const;

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b);
    BigFloat operator-() const { return BigFloat(-v_, lerr_); }
    BigFloat& operator+=(const BigFloat& b) { return *this = *this + b; }
    BigFloat& operator-=(const BigFloat& b) { return *this = *this - b; }
    BigFloat& operator*=(const BigFloat& b) { return *this = *this * b; }
    BigFloat& operator/=(const BigFloat& b) { return *this = *this / b; }

    // Throw PrecisionError when the difference is inside the error bounds.
    friend int compare(const BigFloat& a, const BigFloat& b);
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return compare(a, b) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return compare(a, b) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return compare(a, b) >= 0; }
    // exact zero test on the stored value (no error reasoning)
    bool is_zero() const { return v_ == 0; }
    // true when zero lies inside the error bound
    bool indistinguishable_from_zero() const;

private:
    mpfr_float v_;
    double lerr_;  // -inf for exact
};

double log10_sum(double a, double b);

BigFloat abs(const BigFloat& a);
BigFloat sqrt(const BigFloat& a);
BigFloat log(const BigFloat& a);
BigFloat exp(const BigFloat& a);
BigFloat sin(const BigFloat& a);
BigFloat cos(const BigFloat& a);
BigFloat pow(const BigFloat& a, long e);
BigFloat tgamma(const BigFloat& a);

struct BigComplex {
    BigFloat re, im;

    BigComplex() = default;
    BigComplex(BigFloat r) : re(std::move(r)) {}
    BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}

    BigComplex conj() const { return {re, -im}; }
    std::string str() const;
    double digits() const;

    friend BigComplex operator+(const BigComplex& a, const BigComplex& b) { return {a.re + b.re, a.im + b.im}; }
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b) { return {a.re - b.re, a.im - b.im}; }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b);
    BigComplex operator-() const { return {-re, -im}; }
};

// e^{i t}
BigComplex expi(const BigFloat& t);
BigFloat norm(const BigComplex& z);  // |z|

template <>
struct Scalar<BigFloat> {
    static BigFloat from_int(long n, const BigFloat&) { return BigFloat(n); }
    static bool zero(const BigFloat& a) { return a.is_zero(); }
};

}  // namespace odeforge
