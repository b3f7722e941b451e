#pragma once

// Frobenius solutions  y = x^q sum_l S_l(x) ln^l(x)  at a point of an
// operator, exact over Q, modulo p, or over any field type T with Scalar<T>.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "odeforge/guess.hpp"
#include "odeforge/opalgebra.hpp"

namespace odeforge {

struct LocalFrame {
    enum class Kind { point, infinity, modp, algebraic };
    Kind kind = Kind::point;
    mpq_class center = 0;      // Kind::point
    u32 modp_center = 0;       // Kind::modp
    Poly<mpq_class> minpoly;   // Kind::algebraic: a root of this polynomial

    std::string label() const;
};

// "0", "1/4", "inf", "modp:<w_p>", "root:<polynomial>"
LocalFrame parse_frame(const std::string& text);

template <class T>
struct Indicial {
    Poly<T> poly;                            // in rho
    std::vector<std::pair<T, int>> exponents;  // with multiplicity
    Poly<T> unresolved;                      // factor without roots in the field (irrational exponents)
    bool ordinary = false;                   // head does not vanish at the center
    int head_multiplicity = 0;               // order of vanishing of the d/dw head at the center
};

// Operator in the frame's local variable.
ThetaOpQ local_operator(const ThetaOpQ& op, const LocalFrame& frame);
ThetaOpP local_operator(const ThetaOpP& op, const LocalFrame& frame);

Indicial<mpq_class> indicial(const ThetaOpQ& op, const LocalFrame& frame);
Indicial<Zp> indicial(const ThetaOpP& op, const LocalFrame& frame);

template <class T>
struct LogSolutionT {
    T exponent;
    int depth = 0;
    std::vector<std::vector<T>> parts;  // parts[l][n]: coefficient of x^(q+n) ln^l(x)
    std::string note;                   // free-parameter metadata

    std::size_t count() const { return parts.empty() ? 0 : parts[0].size(); }
    const std::vector<T>& top() const { return parts[depth]; }
};

using LogSolution = LogSolutionT<mpq_class>;
using LogSolutionP = LogSolutionT<Zp>;

template <class T>
struct FrobeniusBasis {
    std::vector<LogSolutionT<T>> solutions;
    // coords[a][b]: free parameter a of N applied to solution b, where N is
    // d/d(ln x); solution b has parameter b equal to 1 and the others 0
    std::vector<std::vector<T>> log_action;
    std::vector<std::string> params;
    std::vector<int> param_level;  // log level l of each parameter; its power is the solution's exponent
    Poly<T> indicial;
};

// Exponents congruent modulo integers: base + n_k with multiplicity mu_k.
template <class T>
struct ExponentClass {
    T base;
    std::vector<std::pair<long, int>> roots;
};

namespace detail {

template <class T>
std::vector<T> shifted_coeffs(const Poly<T>& p, const T& at, std::size_t levels, const T& zero) {
    Poly<T> s = poly::taylor_shift(p, at);
    std::vector<T> out(levels, zero);
    for (std::size_t t = 0; t < levels && t < s.size(); ++t) out[t] = s[t];
    return out;
}

// P(at + N) applied to a vector of log levels; (N c)_l = c_{l+1}
template <class T>
void apply_shifted(const std::vector<T>& q, const std::vector<T>& c, std::vector<T>& acc) {
    std::size_t L = c.size();
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t t = 0; l + t < L; ++t)
            if (!poly::is_zero(q[t]) && !poly::is_zero(c[l + t])) acc[l] = acc[l] + q[t] * c[l + t];
}

template <class T>
std::vector<Poly<T>> lowest_rows(const ThetaOp<T>& op) {
    int j0 = 1 << 30;
    for (const auto& r : op.rows)
        if (!r.empty()) j0 = std::min(j0, poly::low_order(r));
    int D = op.degree();
    std::vector<Poly<T>> P(std::size_t(D - j0 + 1));
    for (int j = j0; j <= D; ++j) {
        Poly<T> pj(op.rows.size(), op.zero());
        for (std::size_t i = 0; i < op.rows.size(); ++i) pj[i] = op.coeff(int(i), j);
        P[std::size_t(j - j0)] = poly::trim(pj);
    }
    return P;
}

template <class T>
std::size_t rank_of(std::vector<std::vector<T>> m) {
    std::size_t r = 0;
    if (m.empty()) return 0;
    std::size_t cols = m[0].size();
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t piv = r;
        while (piv < m.size() && poly::is_zero(m[piv][c])) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[r], m[piv]);
        for (std::size_t i = r + 1; i < m.size(); ++i) {
            if (poly::is_zero(m[i][c])) continue;
            T f = m[i][c] / m[r][c];
            for (std::size_t k = c; k < cols; ++k) m[i][k] = m[i][k] - f * m[r][k];
        }
        ++r;
    }
    return r;
}

}  // namespace detail

// Core recursion on an operator already in the local variable.  Every
// solution is computed through `count` terms past its own exponent.
template <class T>
FrobeniusBasis<T> frobenius_core(const ThetaOp<T>& op, const std::vector<ExponentClass<T>>& classes,
                                 std::size_t count, int depth_budget) {
    const T one = op.one, zero = op.zero();
    auto P = detail::lowest_rows(op);
    int D = int(P.size()) - 1;
    FrobeniusBasis<T> out;
    out.indicial = P[0];
    std::size_t total = 0;
    for (const auto& cl : classes)
        for (auto& r : cl.roots) total += std::size_t(r.second);
    out.log_action.assign(total, std::vector<T>(total, zero));

    std::size_t first_param = 0;
    for (const auto& cl : classes) {
        std::size_t levels = 0;
        for (auto& r : cl.roots) levels += std::size_t(r.second);
        std::size_t class_params = levels;
        std::size_t pidx = 0;
        for (auto& [nk, mu] : cl.roots)
            for (int l0 = 0; l0 < mu; ++l0, ++pidx) {
                std::string name = "alpha[n=" + std::to_string(nk) + ",l=" + std::to_string(l0) + "]";
                out.params.push_back(name);
                out.param_level.push_back(l0);
                std::size_t N = std::size_t(nk) + count;
                std::vector<std::vector<T>> c(N, std::vector<T>(levels, zero));
                for (std::size_t n = std::size_t(nk); n < N; ++n) {
                    std::vector<T> r(levels, zero);
                    for (int j = 1; j <= D && j <= int(n); ++j) {
                        if (P[j].empty()) continue;
                        T at = cl.base + Scalar<T>::from_int(long(n) - j, one);
                        detail::apply_shifted(detail::shifted_coeffs(P[j], at, levels, zero), c[n - j], r);
                    }
                    for (auto& x : r) x = -x;
                    int m = 0;
                    for (auto& [n2, mu2] : cl.roots)
                        if (n2 == long(n)) m = mu2;
                    auto a = detail::shifted_coeffs(P[0], T(cl.base + Scalar<T>::from_int(long(n), one)),
                                                    levels + std::size_t(m), zero);
                    for (int t = 0; t < m; ++t)
                        if (!poly::is_zero(a[t])) throw std::logic_error("indicial root multiplicity mismatch");
                    if (poly::is_zero(a[m])) throw std::logic_error("unexpected indicial root in recursion");
                    // v = 1/U(s) mod s^levels with U(s) = sum_t a[m+t] s^t
                    std::vector<T> v(levels, zero);
                    T inv0 = one / a[m];
                    v[0] = inv0;
                    for (std::size_t k = 1; k < levels; ++k) {
                        T s = zero;
                        for (std::size_t t = 1; t <= k; ++t)
                            if (!poly::is_zero(a[m + t])) s = s + a[m + t] * v[k - t];
                        v[k] = -s * inv0;
                    }
                    std::vector<T> y(levels, zero);
                    detail::apply_shifted(v, r, y);
                    std::vector<T>& x = c[n];
                    for (std::size_t l = 0; l < levels; ++l) {
                        if (l + std::size_t(m) < levels) x[l + m] = y[l];
                        else if (!poly::is_zero(y[l])) throw DepthBudgetExceeded("log level overflow");
                    }
                    for (int l = 0; l < m; ++l) x[l] = (long(n) == nk && l == l0) ? one : zero;
                }
                LogSolutionT<T> sol;
                sol.exponent = cl.base + Scalar<T>::from_int(nk, one);
                sol.depth = 0;
                for (std::size_t l = 0; l < levels; ++l)
                    for (std::size_t n = 0; n < N; ++n)
                        if (!poly::is_zero(c[n][l])) sol.depth = int(l);
                if (sol.depth > depth_budget)
                    throw DepthBudgetExceeded("solution needs ln^" + std::to_string(sol.depth) + ", budget is " +
                                              std::to_string(depth_budget));
                T fact = one;
                for (int l = 0; l <= sol.depth; ++l) {
                    if (l > 0) fact = fact * Scalar<T>::from_int(l, one);
                    T inv = one / fact;
                    std::vector<T> part(count, zero);
                    for (std::size_t n = 0; n < count; ++n) part[n] = c[std::size_t(nk) + n][l] * inv;
                    sol.parts.push_back(std::move(part));
                }
                sol.note = name + "=1, other free constants zeroed";
                // N applied to this solution in parameter coordinates
                std::size_t q = 0;
                for (auto& [n2, mu2] : cl.roots)
                    for (int l2 = 0; l2 < mu2; ++l2, ++q)
                        if (std::size_t(l2 + 1) < levels)
                            out.log_action[first_param + q][first_param + pidx] = c[std::size_t(n2)][l2 + 1];
                out.solutions.push_back(std::move(sol));
            }
        first_param += class_params;
    }
    return out;
}

// Jordan structure of the log action: one BLk entry per block of size k+1.
template <class T>
BlockScheme scheme_of(const FrobeniusBasis<T>& b, const std::string& point) {
    std::size_t n = b.log_action.size();
    std::vector<std::size_t> ranks{n};
    if (n == 0) return BlockScheme(point, {});
    auto pw = b.log_action;
    for (std::size_t k = 1; k <= n + 1; ++k) {
        ranks.push_back(detail::rank_of(pw));
        if (ranks.back() == 0) break;
        // pw = pw * N
        std::vector<std::vector<T>> nx(n, std::vector<T>(n, b.log_action[0][0] - b.log_action[0][0]));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) {
                if (poly::is_zero(pw[i][l])) continue;
                for (std::size_t j = 0; j < n; ++j) nx[i][j] = nx[i][j] + pw[i][l] * b.log_action[l][j];
            }
        pw = std::move(nx);
    }
    // blocks of size >= k: ranks[k-1] - ranks[k]
    std::vector<int> blocks;
    for (std::size_t k = 1; k < ranks.size(); ++k) {
        std::size_t ge_k = ranks[k - 1] - ranks[k];
        std::size_t ge_k1 = k + 1 < ranks.size() ? ranks[k] - ranks[k + 1] : 0;
        for (std::size_t i = 0; i < ge_k - ge_k1; ++i) blocks.push_back(int(k) - 1);
    }
    return BlockScheme(point, blocks);
}

// Coefficients of x^(-q-j0) L(y) per power of ln, n = 0..count-1.
template <class T>
std::vector<std::vector<T>> log_residual(const ThetaOp<T>& local_op, const LogSolutionT<T>& sol) {
    const T one = local_op.one, zero = local_op.zero();
    auto P = detail::lowest_rows(local_op);
    std::size_t levels = std::size_t(sol.depth) + 1, cnt = sol.count();
    std::vector<std::vector<T>> c(cnt, std::vector<T>(levels, zero));
    T fact = one;
    for (std::size_t l = 0; l < levels; ++l) {
        if (l) fact = fact * Scalar<T>::from_int(long(l), one);
        for (std::size_t n = 0; n < cnt; ++n) c[n][l] = sol.parts[l][n] * fact;
    }
    std::vector<std::vector<T>> out(levels, std::vector<T>(cnt, zero));
    for (std::size_t n = 0; n < cnt; ++n) {
        std::vector<T> acc(levels, zero);
        for (std::size_t j = 0; j < P.size() && j <= n; ++j) {
            if (P[j].empty()) continue;
            T at = sol.exponent + Scalar<T>::from_int(long(n) - long(j), one);
            detail::apply_shifted(detail::shifted_coeffs(P[j], at, levels, zero), c[n - j], acc);
        }
        fact = one;
        for (std::size_t l = 0; l < levels; ++l) {
            if (l) fact = fact * Scalar<T>::from_int(long(l), one);
            out[l][n] = acc[l] / fact;
        }
    }
    return out;
}

// Exact mode: exponents must be rational (NotComputable otherwise).
FrobeniusBasis<mpq_class> frobenius_solve(const ThetaOpQ& op, const LocalFrame& frame, std::size_t count,
                                          int depth_budget = 4);
// Mod-p mode on an operator over F_p; classes are formed from roots that
// differ by integers below `count`.
FrobeniusBasis<Zp> frobenius_solve(const ThetaOpP& op, const LocalFrame& frame, std::size_t count,
                                   int depth_budget = 4);

std::vector<ExponentClass<mpq_class>> exponent_classes(const Indicial<mpq_class>& ind);
std::vector<ExponentClass<Zp>> exponent_classes(const Indicial<Zp>& ind, std::size_t count);

// Annihilator of x^q S_top(x) from the highest-log part, of order below
// order(op); nothing when no such operator fits.
std::optional<ThetaOpP> probe_right_factor(const ThetaOpP& op, const LogSolutionP& sol, int max_order,
                                           int max_degree, const GuessOptions& opt = {});

// a + alpha b, aligned on a common exponent
LogSolutionP combine(const LogSolutionP& a, const LogSolutionP& b, u32 alpha);

struct SweepHit {
    u32 alpha;
    ThetaOpP op;
};

// Tries every alpha in [0, p) on a + alpha b.
std::optional<SweepHit> probe_sweep(const ThetaOpP& op, const LogSolutionP& a, const LogSolutionP& b, int max_order,
                                    int max_degree, const GuessOptions& opt = {});

struct AcRootOptions {
    int max_order = 3;
    int max_degree = 8;
    int margin = 10;
    int depth_budget = 4;
    std::optional<u32> root;  // pick a particular root of h mod p
};

struct AcRootResult {
    ThetaOpP op;  // in theta_w form, normalized independently of the root
    u32 root = 0;
    int K = 0;  // multiplicity of h in the head
    int M = 0;  // order
};

std::vector<u32> split_roots(const Poly<mpq_class>& h, u32 p);

AcRootResult accidental_root_factor(const ThetaOpP& op, const Poly<mpq_class>& h, const AcRootOptions& opt = {});

// Text format:
//   logsol exponent=<q> depth=<L> count=<N> prime=<p|exact>
//   log <l>
//   <N coefficients>
std::string write_logsol(const LogSolution& s);
std::string write_logsol(const LogSolutionP& s);

struct LogSolText {
    u32 prime = 0;
    LogSolution sol;  // residues as integers when prime != 0
};

std::vector<LogSolText> read_logsols(std::istream& in);
std::vector<LogSolText> read_logsols_file(const std::string& path);
LogSolutionP to_prime_logsol(const LogSolText& t, u32 p);

}  // namespace odeforge
