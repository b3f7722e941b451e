#pragma once

// Dense univariate polynomials over Q (mpq_class) or F_p (Zp), stored low
// degree first with no trailing zeros; the zero polynomial is empty.

#include <string>
#include <vector>

#include <gmpxx.h>

#include "odeforge/ffcore.hpp"

namespace odeforge {

template <class T>
struct Scalar;

template <>
struct Scalar<mpq_class> {
    static mpq_class from_int(long n, const mpq_class&) { return mpq_class(n); }
    static bool zero(const mpq_class& a) { return sgn(a) == 0; }
};

template <>
struct Scalar<Zp> {
    static Zp from_int(long n, const Zp& proto) { return Zp::of(n, proto.p); }
    static bool zero(const Zp& a) { return a.v == 0; }
};

template <class T>
using Poly = std::vector<T>;

namespace poly {

template <class T>
bool is_zero(const T& a) { return Scalar<T>::zero(a); }

template <class T>
Poly<T>& trim(Poly<T>& a) {
    while (!a.empty() && is_zero(a.back())) a.pop_back();
    return a;
}

template <class T>
int deg(const Poly<T>& a) { return static_cast<int>(a.size()) - 1; }

template <class T>
Poly<T> add(const Poly<T>& a, const Poly<T>& b) {
    Poly<T> r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] = a[i];
        if (i < b.size()) r[i] = r[i] + b[i];
    }
    return trim(r);
}

template <class T>
Poly<T> sub(const Poly<T>& a, const Poly<T>& b) {
    Poly<T> r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] = a[i];
        if (i < b.size()) r[i] = r[i] - b[i];
    }
    return trim(r);
}

template <class T>
Poly<T> scale(const Poly<T>& a, const T& c) {
    Poly<T> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
    return trim(r);
}

template <class T>
Poly<T> mul(const Poly<T>& a, const Poly<T>& b) {
    if (a.empty() || b.empty()) return {};
    Poly<T> r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    }
    return trim(r);
}

template <class T>
Poly<T> shift_up(const Poly<T>& a, std::size_t k) {
    if (a.empty()) return {};
    Poly<T> r(k, a[0] - a[0]);
    r.insert(r.end(), a.begin(), a.end());
    return r;
}

// quotient and remainder; b must be nonzero
template <class T>
std::pair<Poly<T>, Poly<T>> divmod(const Poly<T>& a, const Poly<T>& b) {
    Poly<T> r = a, q;
    trim(r);
    if (r.size() < b.size()) return {q, r};
    q.assign(r.size() - b.size() + 1, b.back() - b.back());
    T lead = b.back();
    for (int k = deg(r) - deg(b); k >= 0; --k) {
        T c = r[k + b.size() - 1] / lead;
        q[k] = c;
        if (is_zero(c)) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[k + j] = r[k + j] - c * b[j];
    }
    r.resize(b.size() - 1);
    trim(q);
    return {q, trim(r)};
}

template <class T>
Poly<T> monic(const Poly<T>& a) {
    if (a.empty()) return a;
    T inv = Scalar<T>::from_int(1, a.back()) / a.back();
    return scale(a, inv);
}

template <class T>
Poly<T> gcd(Poly<T> a, Poly<T> b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

template <class T>
Poly<T> deriv(const Poly<T>& a) {
    if (a.size() <= 1) return {};
    Poly<T> r(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i)
        r[i - 1] = is_zero(a[i]) ? a[i] : a[i] * Scalar<T>::from_int(long(i), a[i]);
    return trim(r);
}

template <class T>
T eval(const Poly<T>& a, const T& x) {
    T r = x - x;
    for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
    return r;
}

// a(x + c)
template <class T>
Poly<T> taylor_shift(const Poly<T>& a, const T& c) {
    Poly<T> r = a;
    std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = n - 1; j > i; --j) r[j - 1] = r[j - 1] + c * r[j];
    return trim(r);
}

// a(s * x)
template <class T>
Poly<T> scale_var(const Poly<T>& a, const T& s) {
    Poly<T> r = a;
    if (r.empty()) return r;
    T pw = Scalar<T>::from_int(1, s);
    for (auto& c : r) {
        c = c * pw;
        pw = pw * s;
    }
    return trim(r);
}

template <class T>
Poly<T> pow(const Poly<T>& a, unsigned e, const T& one) {
    Poly<T> r{one};
    for (unsigned i = 0; i < e; ++i) r = mul(r, a);
    return r;
}

// multiplicity of the factor f in a (a nonzero, deg f >= 1)
template <class T>
int multiplicity(Poly<T> a, const Poly<T>& f) {
    int k = 0;
    trim(a);
    while (!a.empty()) {
        auto [q, r] = divmod(a, f);
        if (!r.empty()) break;
        a = std::move(q);
        ++k;
    }
    return k;
}

// order of vanishing at 0
template <class T>
int low_order(const Poly<T>& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!is_zero(a[i])) return static_cast<int>(i);
    return -1;
}

}  // namespace poly

// integer content and primitive part helpers over Q
mpz_class lcm_denominators(const Poly<mpq_class>& a);
mpz_class gcd_numerators(const Poly<mpq_class>& a);

Poly<mpq_class> parse_qpoly(const std::string& text, const std::string& var = "w");
std::string format_qpoly(const Poly<mpq_class>& a, const std::string& var = "w");

Poly<Zp> reduce(const Poly<mpq_class>& a, u32 p);

// roots in F_p of a polynomial over F_p (brute force for small p, otherwise
// by gcd with x^p - x and equal-degree splitting)
std::vector<u32> roots_mod_p(const Poly<Zp>& a, u32 p);
// rational roots with multiplicity, and the remaining factor without them
std::vector<std::pair<mpq_class, int>> rational_roots(const Poly<mpq_class>& a, Poly<mpq_class>* rest = nullptr);

}  // namespace odeforge
