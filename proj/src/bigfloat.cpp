#include "odeforge/bigfloat.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <sstream>

namespace odeforge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLog10_2 = std::log10(2.0);
thread_local unsigned g_digits = 50;
constexpr unsigned kGuard = 10;

mpfr_ptr raw(mpfr_float& x) { return x.backend().data(); }
mpfr_srcptr raw(const mpfr_float& x) { return x.backend().data(); }

double log10_abs_raw(const mpfr_float& x) {
    if (mpfr_zero_p(raw(x))) return kNegInf;
    long e;
    double d = mpfr_get_d_2exp(&e, raw(x), MPFR_RNDN);
    return std::log10(std::fabs(d)) + double(e) * kLog10_2;
}

// bound on the rounding error of a result with ternary flag `t`
double rounding(const mpfr_float& r, int t) {
    if (t == 0) return kNegInf;
    return log10_abs_raw(r) + (1.0 - double(mpfr_get_prec(raw(r)))) * kLog10_2;
}

mpfr_float fresh() {
    mpfr_float r;
    return r;
}

}  // namespace

unsigned working_digits() { return g_digits; }

PrecisionScope::PrecisionScope(unsigned digits)
    : saved_digits_(g_digits), saved_mpfr_(mpfr_float::default_precision()) {
    if (digits < 20) digits = 20;
    g_digits = digits;
    mpfr_float::default_precision(digits + kGuard);
}

PrecisionScope::~PrecisionScope() {
    g_digits = saved_digits_;
    mpfr_float::default_precision(saved_mpfr_);
}

double log10_sum(double a, double b) {
    double m = std::max(a, b);
    if (m == kNegInf) return kNegInf;
    return m + std::log10(std::pow(10.0, a - m) + std::pow(10.0, b - m));
}

BigFloat::BigFloat() : v_(0), lerr_(kNegInf) {}

BigFloat::BigFloat(const mpfr_float& v, double log10_err) : v_(v), lerr_(log10_err) {}

BigFloat::BigFloat(long v) : v_(fresh()), lerr_(kNegInf) {
    int t = mpfr_set_si(raw(v_), v, MPFR_RNDN);
    lerr_ = rounding(v_, t);
}

BigFloat::BigFloat(const mpq_class& q) : v_(fresh()), lerr_(kNegInf) {
    int t = mpfr_set_q(raw(v_), q.get_mpq_t(), MPFR_RNDN);
    lerr_ = rounding(v_, t);
}

BigFloat::BigFloat(const mpz_class& z) : v_(fresh()), lerr_(kNegInf) {
    int t = mpfr_set_z(raw(v_), z.get_mpz_t(), MPFR_RNDN);
    lerr_ = rounding(v_, t);
}

BigFloat BigFloat::pi() {
    mpfr_float r = fresh();
    int t = mpfr_const_pi(raw(r), MPFR_RNDN);
    return BigFloat(r, rounding(r, t));
}

BigFloat BigFloat::parse(const std::string& text) {
    auto at = text.find('@');
    std::string num = text.substr(0, at);
    mpfr_float v = fresh();
    if (mpfr_set_str(raw(v), num.c_str(), 10, MPFR_RNDN) != 0 || !mpfr_number_p(raw(v)))
        throw FormatError("bad number: " + text);
    if (at == std::string::npos) return BigFloat(v, log10_abs_raw(v) - double(g_digits));
    std::string tag = text.substr(at + 1);
    if (tag == "exact") return BigFloat(v, kNegInf);
    double d;
    try {
        d = std::stod(tag);
    } catch (...) {
        throw FormatError("bad precision tag: " + text);
    }
    double la = log10_abs_raw(v);
    return BigFloat(v, (la == kNegInf ? 0.0 : la) - d);
}

bool BigFloat::exact() const { return lerr_ == kNegInf; }

double BigFloat::log10_abs() const { return log10_abs_raw(v_); }

double BigFloat::digits() const {
    if (exact()) return std::numeric_limits<double>::infinity();
    double la = log10_abs();
    if (la == kNegInf) return 0;
    return la - lerr_;
}

bool BigFloat::indistinguishable_from_zero() const {
    if (v_ == 0) return true;
    return log10_abs() <= lerr_;
}

BigFloat BigFloat::widened(double log10_extra) const { return BigFloat(v_, log10_sum(lerr_, log10_extra)); }

mpq_class BigFloat::to_mpq() const {
    if (mpfr_zero_p(raw(v_))) return 0;
    mpz_class m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), raw(v_));
    mpq_class q(m);
    if (e > 0) mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), mp_bitcnt_t(e));
    else if (e < 0) mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), mp_bitcnt_t(-e));
    return q;
}

std::string BigFloat::str() const { return str(int(g_digits)); }

std::string BigFloat::str(int max_digits) const {
    double d = digits();
    int shown;
    std::string tag;
    if (exact()) {
        if (mpfr_integer_p(raw(v_)) && log10_abs() < max_digits) {
            mpz_class z;
            mpfr_get_z(z.get_mpz_t(), raw(v_), MPFR_RNDN);
            return z.get_str() + "@exact";
        }
        shown = max_digits;
        tag = std::to_string(max_digits);
    } else {
        shown = int(std::floor(std::min<double>(d, max_digits)));
        if (shown < 1) {
            // only an error bound survives
            std::ostringstream out;
            out << "0e" << int(std::ceil(lerr_)) << "@0";
            return out.str();
        }
        tag = std::to_string(shown);
    }
    return v_.str(shown, std::ios_base::scientific) + "@" + tag;
}

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    mpfr_float r = fresh();
    int t = mpfr_add(raw(r), raw(a.v_), raw(b.v_), MPFR_RNDN);
    return BigFloat(r, log10_sum(log10_sum(a.lerr_, b.lerr_), rounding(r, t)));
}

BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    mpfr_float r = fresh();
    int t = mpfr_sub(raw(r), raw(a.v_), raw(b.v_), MPFR_RNDN);
    return BigFloat(r, log10_sum(log10_sum(a.lerr_, b.lerr_), rounding(r, t)));
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    mpfr_float r = fresh();
    int t = mpfr_mul(raw(r), raw(a.v_), raw(b.v_), MPFR_RNDN);
    double la = a.log10_abs(), lb = b.log10_abs();
    double e = log10_sum(la + b.lerr_, lb + a.lerr_);
    e = log10_sum(e, a.lerr_ + b.lerr_);
    return BigFloat(r, log10_sum(e, rounding(r, t)));
}

BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    if (b.v_ == 0) throw PrecisionError("division by zero");
    double lb = b.log10_abs();
    if (b.lerr_ >= lb - 1e-12) throw PrecisionError("division by a value indistinguishable from zero");
    mpfr_float r = fresh();
    int t = mpfr_div(raw(r), raw(a.v_), raw(b.v_), MPFR_RNDN);
    double lr = log10_abs_raw(r);
    // (ea + |r| eb) / (|b| - eb)
    double num = log10_sum(a.lerr_, lr + b.lerr_);
    double den = lb + std::log10(1.0 - std::pow(10.0, b.lerr_ - lb));
    return BigFloat(r, log10_sum(num - den, rounding(r, t)));
}

int compare(const BigFloat& a, const BigFloat& b) {
    BigFloat d = a - b;
    if (d.v_ == 0 && d.exact()) return 0;
    if (d.indistinguishable_from_zero())
        throw PrecisionError("comparison below the precision floor (difference " + d.str(8) + ")");
    return d.v_ > 0 ? 1 : -1;
}

BigFloat abs(const BigFloat& a) { return BigFloat(boost::multiprecision::abs(a.value()), a.log10_error()); }

BigFloat sqrt(const BigFloat& a) {
    double la = a.log10_abs(), ea = a.log10_error();
    if (a.value() < 0 && la > ea) throw PrecisionError("square root of a negative number");
    mpfr_float r = fresh();
    if (la <= ea) {
        // zero inside the bound
        mpfr_float x = a.value() < 0 ? mpfr_float(0) : a.value();
        mpfr_sqrt(raw(r), raw(x), MPFR_RNDN);
        return BigFloat(r, 0.5 * log10_sum(la, ea) + 0.01);
    }
    int t = mpfr_sqrt(raw(r), raw(a.value()), MPFR_RNDN);
    // |sqrt(a) - sqrt(a')| <= e / sqrt(a)
    return BigFloat(r, log10_sum(ea - 0.5 * la, rounding(r, t)));
}

BigFloat log(const BigFloat& a) {
    double la = a.log10_abs(), ea = a.log10_error();
    if (a.value() <= 0 || ea >= la) throw PrecisionError("logarithm of a value not known to be positive");
    mpfr_float r = fresh();
    int t = mpfr_log(raw(r), raw(a.value()), MPFR_RNDN);
    // |ln a - ln a'| <= e / (a - e)
    double rel = ea - la;
    double bound = rel - std::log10(1.0 - std::pow(10.0, rel));
    return BigFloat(r, log10_sum(bound, rounding(r, t)));
}

BigFloat exp(const BigFloat& a) {
    mpfr_float r = fresh();
    int t = mpfr_exp(raw(r), raw(a.value()), MPFR_RNDN);
    double ea = a.log10_error(), lr = log10_abs_raw(r);
    double bound;
    if (ea == kNegInf) bound = kNegInf;
    else if (ea <= 0) bound = lr + ea + std::log10(std::exp(1.0) - 1.0);  // expm1(x) <= (e-1) x on [0,1]
    else bound = lr + std::pow(10.0, ea) / std::log(10.0);
    return BigFloat(r, log10_sum(bound, rounding(r, t)));
}

BigFloat sin(const BigFloat& a) {
    mpfr_float r = fresh();
    int t = mpfr_sin(raw(r), raw(a.value()), MPFR_RNDN);
    return BigFloat(r, log10_sum(a.log10_error(), rounding(r, t)));
}

BigFloat cos(const BigFloat& a) {
    mpfr_float r = fresh();
    int t = mpfr_cos(raw(r), raw(a.value()), MPFR_RNDN);
    return BigFloat(r, log10_sum(a.log10_error(), rounding(r, t)));
}

BigFloat pow(const BigFloat& a, long e) {
    if (e < 0) return BigFloat(1) / pow(a, -e);
    BigFloat r(1), b = a;
    while (e) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

BigFloat tgamma(const BigFloat& a) {
    mpfr_float r = fresh();
    int t = mpfr_gamma(raw(r), raw(a.value()), MPFR_RNDN);
    double bound = kNegInf;
    if (!a.exact()) {
        // |Gamma'| = |Gamma psi|, doubled for the second-order term
        mpfr_float psi = boost::math::digamma(a.value());
        bound = log10_abs_raw(r) + log10_abs_raw(psi) + a.log10_error() + std::log10(2.0);
    }
    return BigFloat(r, log10_sum(bound, rounding(r, t)));
}

BigComplex operator/(const BigComplex& a, const BigComplex& b) {
    BigFloat d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

BigComplex expi(const BigFloat& t) { return {cos(t), sin(t)}; }

BigFloat norm(const BigComplex& z) { return sqrt(z.re * z.re + z.im * z.im); }

double BigComplex::digits() const {
    double la = std::max(re.log10_abs(), im.log10_abs());
    double e = log10_sum(re.log10_error(), im.log10_error());
    if (e == kNegInf) return std::numeric_limits<double>::infinity();
    if (la == kNegInf) return 0;
    return la - e;
}

std::string BigComplex::str() const { return re.str() + " + i*" + im.str(); }

}  // namespace odeforge
