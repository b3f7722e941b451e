#pragma once

#include <string>
#include <utility>
#include <vector>

#include "odeforge/theta.hpp"

namespace odeforge {

// Coefficient n of the output is sum_i sum_j a_{i,j} (n-j)^i c_{n-j};
// the output keeps input length minus the operator degree.
std::vector<mpq_class> apply(const ThetaOpQ& op, const std::vector<mpq_class>& s);

namespace detail {
long binom(int n, int k);
}

// Composition a o b, using theta o w^j = w^j (theta + j).
template <class T>
ThetaOp<T> multiply(const ThetaOp<T>& a, const ThetaOp<T>& b) {
    const T& one = poly::is_zero(a.one) ? b.one : a.one;
    if (a.is_zero() || b.is_zero()) return ThetaOp<T>({}, one);
    std::vector<Poly<T>> rows(a.rows.size() + b.rows.size() - 1);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].empty()) continue;
        for (std::size_t k = 0; k < b.rows.size(); ++k) {
            const auto& beta = b.rows[k];
            if (beta.empty()) continue;
            for (std::size_t t = 0; t <= i; ++t) {
                T c = Scalar<T>::from_int(detail::binom(int(i), int(t)), one);
                Poly<T> g(beta.size(), one - one);
                for (std::size_t j = 0; j < beta.size(); ++j) {
                    T jp = one;
                    T jj = Scalar<T>::from_int(long(j), one);
                    for (std::size_t e = 0; e < i - t; ++e) jp = jp * jj;
                    g[j] = beta[j] * c * jp;
                }
                rows[t + k] = poly::add(rows[t + k], poly::mul(a.rows[i], poly::trim(g)));
            }
        }
    }
    return ThetaOp<T>(std::move(rows), one);
}

// Formal adjoint with w* = w and (d/dw)* = -d/dw, so theta* = -theta - 1.
template <class T>
ThetaOp<T> adjoint(const ThetaOp<T>& op) {
    const T& one = op.one;
    std::vector<Poly<T>> rows(op.rows.size());
    for (std::size_t i = 0; i < op.rows.size(); ++i)
        for (std::size_t j = 0; j < op.rows[i].size(); ++j) {
            if (poly::is_zero(op.rows[i][j])) continue;
            // w^j (-theta - 1 - j)^i
            T shift = Scalar<T>::from_int(-1 - long(j), one);
            for (std::size_t t = 0; t <= i; ++t) {
                T c = Scalar<T>::from_int(detail::binom(int(i), int(t)) * ((t % 2) ? -1 : 1), one);
                for (std::size_t e = 0; e < i - t; ++e) c = c * shift;
                Poly<T> term(j + 1, one - one);
                term[j] = op.rows[i][j] * c;
                rows[t] = poly::add(rows[t], term);
            }
        }
    return ThetaOp<T>(std::move(rows), one);
}

// multiplier * l = quotient * r + remainder, order(remainder) < order(r);
// quotient and remainder are jointly primitive integral.
struct RightDivision {
    ThetaOpQ quotient;
    ThetaOpQ remainder;
    Poly<mpq_class> multiplier;
};

RightDivision right_divide(const ThetaOpQ& l, const ThetaOpQ& r);
bool right_divides(const ThetaOpQ& r, const ThetaOpQ& l);

// First-order operator annihilating num/den, gcd-reduced and primitive.
ThetaOpQ annihilator_of_rational(const Poly<mpq_class>& num, const Poly<mpq_class>& den);

enum class Curvature { zero, nilpotent, neither };

struct CurvatureReport {
    Curvature kind;
    int witness_power = 0;  // smallest m with A_p^m = 0; 0 for neither
    u32 prime = 0;
};

std::string to_string(Curvature c);

CurvatureReport p_curvature(const ThetaOpP& op, bool check_zero = true);
// throws BadReduction when the head polynomial vanishes mod p
CurvatureReport p_curvature(const ThetaOpQ& op, u32 p, bool check_zero = true);

long symmetric_power_order(long q, long n);
std::pair<long, long> symmetric_product_order_bounds(long q1, long q2);

// Logarithmic blocks at one point; entry n stands for a BLn block of n+1
// solutions whose top log power is n.
struct BlockScheme {
    std::string point;
    std::vector<int> blocks;  // sorted descending

    BlockScheme() = default;
    BlockScheme(std::string pt, std::vector<int> b);
    int solutions() const;
    std::string describe() const;
    bool operator==(const BlockScheme& o) const { return point == o.point && blocks == o.blocks; }
};

BlockScheme block_product_scheme(const BlockScheme& a, const BlockScheme& b);
// symmetric n-th power of the solution space carrying scheme a
BlockScheme block_symmetric_power(const BlockScheme& a, int n);

enum class SymMode { power, product };

struct PointVerdict {
    std::string point;
    bool not_ruled_out = false;
    std::string explanation;
};

struct SymVerdict {
    bool not_ruled_out = false;
    std::vector<PointVerdict> points;
    std::string summary() const;
};

// product mode: config lists the factor orders; power mode: config = {q, n}
SymVerdict check_sym_decomposition(const std::vector<BlockScheme>& target, const std::vector<int>& config,
                                   SymMode mode);

// d/dw form as strings for display
std::string format_dform(const ThetaOpQ& op);

}  // namespace odeforge
