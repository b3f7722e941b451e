#pragma once

// Linear differential operators  L = sum_i r_i(w) theta^i,  theta = w d/dw,
// with r_i polynomials over Q or F_p, plus the equivalent d/dw form.

#include <string>
#include <vector>

#include "odeforge/poly.hpp"

namespace odeforge {

template <class T>
struct ThetaOp {
    // rows[i] multiplies theta^i
    std::vector<Poly<T>> rows;
    T one;

    ThetaOp() : one(Scalar<T>::from_int(1, T{})) {}
    ThetaOp(std::vector<Poly<T>> r, T unit) : rows(std::move(r)), one(unit) { normalize(); }

    int order() const { return static_cast<int>(rows.size()) - 1; }
    int degree() const {
        int d = 0;
        for (const auto& r : rows) d = std::max(d, poly::deg(r));
        return d;
    }
    T zero() const { return one - one; }
    T coeff(int i, int j) const {
        if (i < 0 || i >= int(rows.size()) || j < 0 || j >= int(rows[i].size())) return zero();
        return rows[i][j];
    }
    void set(int i, int j, const T& v) {
        if (int(rows.size()) <= i) rows.resize(i + 1);
        if (int(rows[i].size()) <= j) rows[i].resize(j + 1, zero());
        rows[i][j] = v;
    }
    const Poly<T>& head() const { return rows.back(); }
    bool is_zero() const { return rows.empty(); }
    // drop zero high rows and trailing zero coefficients
    void normalize() {
        for (auto& r : rows) poly::trim(r);
        while (!rows.empty() && rows.back().empty()) rows.pop_back();
    }
    bool operator==(const ThetaOp& o) const { return rows == o.rows; }
};

template <>
inline ThetaOp<Zp>::ThetaOp() : one() {}

using ThetaOpQ = ThetaOp<mpq_class>;
using ThetaOpP = ThetaOp<Zp>;

// Coefficients b_k of d^k/dw^k.
template <class T>
struct DOp {
    std::vector<Poly<T>> b;
    T one;
};

// Stirling numbers: theta^i = sum_k S2(i,k) w^k D^k and
// w^k D^k = theta (theta-1) ... (theta-k+1) = sum_i s1(k,i) theta^i.
long stirling2(int n, int k);
long stirling1(int n, int k);

template <class T>
DOp<T> to_dform(const ThetaOp<T>& op) {
    DOp<T> d{std::vector<Poly<T>>(op.rows.size()), op.one};
    for (std::size_t i = 0; i < op.rows.size(); ++i)
        for (std::size_t k = 0; k <= i; ++k) {
            long s = stirling2(int(i), int(k));
            if (!s || op.rows[i].empty()) continue;
            Poly<T> term = poly::shift_up(poly::scale(op.rows[i], Scalar<T>::from_int(s, op.one)), k);
            d.b[k] = poly::add(d.b[k], term);
        }
    return d;
}

// Left-multiplies by the least power w^s making every b_k divisible by w^k;
// s is reported through `shift`.
template <class T>
ThetaOp<T> from_dform(const DOp<T>& d, int* shift = nullptr) {
    // net power of w so that every row is polynomial and one row has a
    // nonzero constant term
    int lo = 1 << 30;
    for (std::size_t k = 0; k < d.b.size(); ++k)
        if (!d.b[k].empty()) lo = std::min(lo, poly::low_order(d.b[k]) - int(k));
    int s = lo == (1 << 30) ? 0 : -lo;
    std::vector<Poly<T>> rows(d.b.size());
    for (std::size_t k = 0; k < d.b.size(); ++k) {
        if (d.b[k].empty()) continue;
        Poly<T> q = d.b[k];
        int sh = s - int(k);
        if (sh >= 0) q = poly::shift_up(q, sh);
        else q.erase(q.begin(), q.begin() + (-sh));
        for (std::size_t i = 0; i <= k; ++i) {
            long c = stirling1(int(k), int(i));
            if (c) rows[i] = poly::add(rows[i], poly::scale(q, Scalar<T>::from_int(c, d.one)));
        }
    }
    if (shift) *shift = s;
    return ThetaOp<T>(std::move(rows), d.one);
}

// Operator in the local variable x = sigma (w - c), theta_x form.
template <class T>
ThetaOp<T> recenter(const ThetaOp<T>& op, const T& c, const T& sigma) {
    DOp<T> d = to_dform(op);
    T inv_sigma = op.one / sigma;
    T pw = op.one;
    for (auto& bk : d.b) {
        bk = poly::scale(poly::scale_var(poly::taylor_shift(bk, c), inv_sigma), pw);
        pw = pw * sigma;
    }
    return from_dform(d);
}

// Operator in x = 1/w.
template <class T>
ThetaOp<T> at_infinity(const ThetaOp<T>& op) {
    int D = op.degree();
    std::vector<Poly<T>> rows(op.rows.size());
    for (std::size_t i = 0; i < op.rows.size(); ++i) {
        Poly<T> r(D + 1, op.zero());
        for (std::size_t j = 0; j < op.rows[i].size(); ++j) r[D - j] = op.rows[i][j];
        if (i % 2) r = poly::scale(r, T(-op.one));
        rows[i] = poly::trim(r);
    }
    return ThetaOp<T>(std::move(rows), op.one);
}

// Coefficients n in [start, start+count) of L applied to sum c_n x^(base+n),
// where c is given from index 0 (values below 0 are zero).
template <class T>
std::vector<T> apply_coeffs(const ThetaOp<T>& op, const std::vector<T>& c, const T& base, std::size_t start,
                            std::size_t count) {
    std::vector<T> out(count, op.zero());
    int D = op.degree();
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t n = start + k;
        T acc = op.zero();
        for (int j = 0; j <= D && j <= int(n); ++j) {
            const T& cn = c[n - j];
            if (poly::is_zero(cn)) continue;
            T idx = base + Scalar<T>::from_int(long(n) - j, op.one);
            // sum_i a_{i,j} idx^i by Horner
            T h = op.zero();
            for (std::size_t i = op.rows.size(); i-- > 0;) h = h * idx + op.coeff(int(i), j);
            acc = acc + h * cn;
        }
        out[k] = acc;
    }
    return out;
}

// Polynomial in rho whose roots are the exponents at w = 0.
template <class T>
Poly<T> indicial_at_zero(const ThetaOp<T>& op) {
    int j0 = 1 << 30;
    for (const auto& r : op.rows)
        if (!r.empty()) j0 = std::min(j0, poly::low_order(r));
    Poly<T> ind(op.rows.size(), op.zero());
    for (std::size_t i = 0; i < op.rows.size(); ++i) ind[i] = op.coeff(int(i), j0);
    return poly::trim(ind);
}

ThetaOpP reduce(const ThetaOpQ& op, u32 p);
// Integer coefficients with content 1 and positive leading sign; also removes
// a common power of w.
ThetaOpQ primitive(const ThetaOpQ& op);
// Scale so the first nonzero coefficient in (i, j) lexicographic order is 1.
template <class T>
ThetaOp<T> lex_normalized(const ThetaOp<T>& op) {
    for (const auto& r : op.rows)
        for (const auto& c : r)
            if (!poly::is_zero(c)) {
                T inv = op.one / c;
                std::vector<Poly<T>> rows;
                for (const auto& rr : op.rows) rows.push_back(poly::scale(rr, inv));
                return ThetaOp<T>(std::move(rows), op.one);
            }
    return op;
}

ThetaOpQ theta_from_rows(const std::vector<std::vector<long>>& rows);

}  // namespace odeforge
