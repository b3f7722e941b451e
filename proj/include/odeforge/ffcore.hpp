#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "odeforge/errors.hpp"

namespace odeforge {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

bool is_prime(u64 n);

// Odd primes below `bound`, largest first.
std::vector<u32> default_primes(std::size_t count, u32 bound = 1u << 15);

class PrimeField {
public:
    static constexpr u64 default_limit = 1u << 15;
    static constexpr u64 word_limit = 1ull << 31;

    explicit PrimeField(u64 p, u64 limit = default_limit);

    u32 p() const { return p_; }
    bool operator==(const PrimeField& o) const { return p_ == o.p_; }
    bool operator!=(const PrimeField& o) const { return p_ != o.p_; }

    u32 add(u32 a, u32 b) const { u32 s = a + b; return s >= p_ ? s - p_ : s; }
    u32 sub(u32 a, u32 b) const { return a >= b ? a - b : a + p_ - b; }
    u32 neg(u32 a) const { return a ? p_ - a : 0; }
    u32 mul(u32 a, u32 b) const { return static_cast<u32>(u64(a) * b % p_); }
    u32 pow(u32 a, u64 e) const;
    u32 inv(u32 a) const;
    u32 div(u32 a, u32 b) const { return mul(a, inv(b)); }

    u32 from_int(i64 v) const;
    u32 from_mpz(const mpz_class& v) const;
    // throws NonInvertibleLeadingTerm when p divides the denominator
    u32 from_mpq(const mpq_class& v) const;
    // symmetric representative in (-p/2, p/2]
    i64 signed_value(u32 a) const { return a > p_ / 2 ? i64(a) - p_ : i64(a); }

private:
    u32 p_;
};

// Field element that carries its modulus; p == 0 marks an untyped zero/one
// produced by default construction or integer conversion.
struct Zp {
    u32 v = 0;
    u32 p = 0;

    Zp() = default;
    Zp(u32 value, u32 modulus) : v(value), p(modulus) {}

    static Zp of(i64 value, u32 modulus);
    bool is_zero() const { return v == 0; }

    friend Zp operator+(Zp a, Zp b);
    friend Zp operator-(Zp a, Zp b);
    friend Zp operator*(Zp a, Zp b);
    friend Zp operator/(Zp a, Zp b);
    Zp operator-() const { return Zp(v && p ? p - v : 0, p); }
    Zp& operator+=(Zp b) { return *this = *this + b; }
    Zp& operator-=(Zp b) { return *this = *this - b; }
    Zp& operator*=(Zp b) { return *this = *this * b; }
    Zp& operator/=(Zp b) { return *this = *this / b; }
    bool operator==(const Zp& o) const { return v == o.v; }
    bool operator!=(const Zp& o) const { return v != o.v; }
};

struct PrimeSeries {
    PrimeField field;
    std::string var = "w";
    long offset = 0;
    std::vector<u32> coeffs;

    PrimeSeries(PrimeField f, std::vector<u32> c, long off = 0, std::string v = "w")
        : field(f), var(std::move(v)), offset(off), coeffs(std::move(c)) {}

    std::size_t size() const { return coeffs.size(); }
    // absolute order of the first unknown coefficient
    long end() const { return offset + static_cast<long>(coeffs.size()); }
    // coefficient of w^n, zero below offset; n must be < end()
    u32 at(long n) const { return n < offset ? 0 : coeffs[static_cast<std::size_t>(n - offset)]; }
    // move leading zeros into the offset
    PrimeSeries normalized() const;
};

PrimeSeries series_add(const PrimeSeries& a, const PrimeSeries& b);
PrimeSeries series_mul(const PrimeSeries& a, const PrimeSeries& b);
PrimeSeries series_recip(const PrimeSeries& a);
// a(b(w)); b must have offset >= 1
PrimeSeries series_compose(const PrimeSeries& a, const PrimeSeries& b);

struct FpMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<u32> entries;

    FpMatrix() = default;
    FpMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0) {}
    u32& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
    u32 operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

// Basis of the right kernel. Vectors are returned with a 1 at their free
// column and zeros at the other free columns.
std::vector<std::vector<u32>> nullspace(const FpMatrix& m, const PrimeField& f);
std::size_t rank(const FpMatrix& m, const PrimeField& f);
std::vector<u32> mat_vec(const FpMatrix& m, const std::vector<u32>& v, const PrimeField& f);

}  // namespace odeforge
