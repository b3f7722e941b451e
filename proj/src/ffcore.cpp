#include "odeforge/ffcore.hpp"

#include <algorithm>

namespace odeforge {

bool is_prime(u64 n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (u64 d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::vector<u32> default_primes(std::size_t count, u32 bound) {
    std::vector<u32> out;
    for (u32 n = bound - 1; n > 2 && out.size() < count; --n)
        if (n % 2 && is_prime(n)) out.push_back(n);
    return out;
}

PrimeField::PrimeField(u64 p, u64 limit) {
    if (limit > word_limit) limit = word_limit;
    if (p < 3 || p >= limit || !is_prime(p))
        throw NotPrime("not an odd prime below " + std::to_string(limit) + ": " + std::to_string(p));
    p_ = static_cast<u32>(p);
}

u32 PrimeField::pow(u32 a, u64 e) const {
    u64 r = 1, b = a % p_;
    while (e) {
        if (e & 1) r = r * b % p_;
        b = b * b % p_;
        e >>= 1;
    }
    return static_cast<u32>(r);
}

u32 PrimeField::inv(u32 a) const {
    if (a % p_ == 0) throw NonInvertibleLeadingTerm("inverse of zero mod " + std::to_string(p_));
    i64 t = 0, nt = 1, r = p_, nr = a % p_;
    while (nr) {
        i64 q = r / nr;
        t -= q * nt; std::swap(t, nt);
        r -= q * nr; std::swap(r, nr);
    }
    return static_cast<u32>(t < 0 ? t + p_ : t);
}

u32 PrimeField::from_int(i64 v) const {
    i64 r = v % static_cast<i64>(p_);
    return static_cast<u32>(r < 0 ? r + p_ : r);
}

u32 PrimeField::from_mpz(const mpz_class& v) const {
    return static_cast<u32>(mpz_fdiv_ui(v.get_mpz_t(), p_));
}

u32 PrimeField::from_mpq(const mpq_class& v) const {
    u32 d = from_mpz(v.get_den());
    if (d == 0) throw NonInvertibleLeadingTerm("denominator divisible by " + std::to_string(p_));
    return div(from_mpz(v.get_num()), d);
}

Zp Zp::of(i64 value, u32 modulus) {
    if (modulus == 0) throw FieldMismatch("prime field element without a modulus");
    i64 r = value % static_cast<i64>(modulus);
    return Zp(static_cast<u32>(r < 0 ? r + modulus : r), modulus);
}

static u32 common_modulus(const Zp& a, const Zp& b) {
    if (a.p && b.p && a.p != b.p) throw FieldMismatch();
    return a.p ? a.p : b.p;
}

Zp operator+(Zp a, Zp b) {
    u32 p = common_modulus(a, b);
    if (!p) return Zp();
    u32 s = a.v + b.v;
    return Zp(s >= p ? s - p : s, p);
}

Zp operator-(Zp a, Zp b) {
    u32 p = common_modulus(a, b);
    if (!p) return Zp();
    return Zp(a.v >= b.v ? a.v - b.v : a.v + p - b.v, p);
}

Zp operator*(Zp a, Zp b) {
    u32 p = common_modulus(a, b);
    if (!p) return Zp();
    return Zp(static_cast<u32>(u64(a.v) * b.v % p), p);
}

Zp operator/(Zp a, Zp b) {
    u32 p = common_modulus(a, b);
    if (!p || b.v == 0) throw NonInvertibleLeadingTerm("division by zero in prime field");
    return Zp(PrimeField(p, PrimeField::word_limit).div(a.v, b.v), p);
}

PrimeSeries PrimeSeries::normalized() const {
    std::size_t k = 0;
    while (k + 1 < coeffs.size() && coeffs[k] == 0) ++k;
    if (k == 0) return *this;
    return PrimeSeries(field, std::vector<u32>(coeffs.begin() + k, coeffs.end()), offset + long(k), var);
}

static void check_compatible(const PrimeSeries& a, const PrimeSeries& b) {
    if (a.field != b.field || a.var != b.var) throw FieldMismatch();
}

PrimeSeries series_add(const PrimeSeries& a, const PrimeSeries& b) {
    check_compatible(a, b);
    const auto& F = a.field;
    long lo = std::min(a.offset, b.offset);
    long hi = std::min(a.end(), b.end());
    std::vector<u32> c;
    for (long n = lo; n < hi; ++n) c.push_back(F.add(a.at(n), b.at(n)));
    if (c.empty()) c.push_back(0);
    return PrimeSeries(F, std::move(c), lo, a.var);
}

PrimeSeries series_mul(const PrimeSeries& a, const PrimeSeries& b) {
    check_compatible(a, b);
    const auto& F = a.field;
    // relative precision is the shorter of the two
    std::size_t len = std::min(a.size(), b.size());
    std::vector<u32> c(len, 0);
    for (std::size_t n = 0; n < len; ++n) {
        u64 acc = 0;
        for (std::size_t k = 0; k <= n; ++k) acc = (acc + u64(a.coeffs[k]) * b.coeffs[n - k]) % F.p();
        c[n] = static_cast<u32>(acc);
    }
    return PrimeSeries(F, std::move(c), a.offset + b.offset, a.var);
}

PrimeSeries series_recip(const PrimeSeries& a) {
    const auto& F = a.field;
    if (a.coeffs.empty() || a.coeffs[0] == 0) throw NonInvertibleLeadingTerm();
    std::size_t len = a.size();
    std::vector<u32> r(len, 0);
    u32 inv0 = F.inv(a.coeffs[0]);
    r[0] = inv0;
    for (std::size_t n = 1; n < len; ++n) {
        u64 acc = 0;
        for (std::size_t k = 1; k <= n; ++k) acc = (acc + u64(a.coeffs[k]) * r[n - k]) % F.p();
        r[n] = F.mul(F.neg(static_cast<u32>(acc)), inv0);
    }
    return PrimeSeries(F, std::move(r), -a.offset, a.var);
}

PrimeSeries series_compose(const PrimeSeries& a, const PrimeSeries& b) {
    check_compatible(a, b);
    if (b.offset < 1) throw NonInvertibleLeadingTerm("inner series must vanish at 0");
    if (a.offset < 0) throw NonInvertibleLeadingTerm("outer series has negative powers");
    const auto& F = a.field;
    // result known through w^(end-1) where end is limited by both inputs
    long end = std::min(a.end() * b.offset, b.end() + (a.offset > 0 ? (a.offset - 1) * b.offset : 0));
    std::size_t len = static_cast<std::size_t>(end);
    std::vector<u32> inner(len, 0);
    for (long n = b.offset; n < std::min<long>(b.end(), end); ++n) inner[n] = b.at(n);
    std::vector<u32> acc(len, 0), power(len, 0);
    power[0] = 1;
    for (long k = 0; k < a.end(); ++k) {
        if (k >= a.offset) {
            u32 ck = a.at(k);
            if (ck)
                for (std::size_t n = 0; n < len; ++n) acc[n] = F.add(acc[n], F.mul(ck, power[n]));
        }
        std::vector<u32> next(len, 0);
        for (std::size_t i = 0; i < len; ++i) {
            if (!power[i]) continue;
            for (std::size_t j = 1; i + j < len; ++j)
                if (inner[j]) next[i + j] = F.add(next[i + j], F.mul(power[i], inner[j]));
        }
        power.swap(next);
    }
    return PrimeSeries(F, std::move(acc), 0, a.var);
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(FpMatrix& m, const PrimeField& f) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t piv = r;
        while (piv < m.rows && m(piv, c) == 0) ++piv;
        if (piv == m.rows) continue;
        if (piv != r)
            for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(piv, j), m(r, j));
        u32 s = f.inv(m(r, c));
        for (std::size_t j = c; j < m.cols; ++j) m(r, j) = f.mul(m(r, j), s);
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == r || m(i, c) == 0) continue;
            u32 t = f.neg(m(i, c));
            for (std::size_t j = c; j < m.cols; ++j)
                if (m(r, j)) m(i, j) = static_cast<u32>((m(i, j) + u64(t) * m(r, j)) % f.p());
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

std::vector<std::vector<u32>> nullspace(const FpMatrix& m0, const PrimeField& f) {
    FpMatrix m = m0;
    auto pivots = rref(m, f);
    std::vector<char> is_pivot(m.cols, 0);
    for (auto c : pivots) is_pivot[c] = 1;
    std::vector<std::vector<u32>> basis;
    for (std::size_t free = 0; free < m.cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<u32> v(m.cols, 0);
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = f.neg(m(r, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

std::size_t rank(const FpMatrix& m0, const PrimeField& f) {
    FpMatrix m = m0;
    return rref(m, f).size();
}

std::vector<u32> mat_vec(const FpMatrix& m, const std::vector<u32>& v, const PrimeField& f) {
    std::vector<u32> out(m.rows, 0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        u64 acc = 0;
        for (std::size_t j = 0; j < m.cols; ++j) acc = (acc + u64(m(i, j)) * v[j]) % f.p();
        out[i] = static_cast<u32>(acc);
    }
    return out;
}

}  // namespace odeforge
