#pragma once

// Numeric layer: local bases evaluated in BigFloat, connection matching,
// winding continuation, series transforms and tail analysis.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "odeforge/bigfloat.hpp"
#include "odeforge/localfrob.hpp"

namespace odeforge {

// ---- matching point ------------------------------------------------------

enum class MatchMode { linear, sqrt };

struct OptMatch {
    double ym = 0;
    double digits = 0;
};

// Balances 2 Nw y = Ny ln(ry/y)  (or 2 Nw sqrt(y) in sqrt mode).
OptMatch optimize_match_point(double Nw, double Ny, double ry = 0.183, MatchMode mode = MatchMode::linear);

// ---- tail analysis -------------------------------------------------------

struct RadiusReport {
    double radius = 0;
    double error = 0;
    bool oscillating = false;   // coefficient signs are not constant
    std::string sign_pattern;   // constant, alternating, irregular
    std::string method;         // ratio or squared-ratio
    std::size_t used = 0;
};

RadiusReport radius_estimate(const std::vector<BigFloat>& c, std::size_t window = 0);
RadiusReport radius_estimate(const std::vector<mpq_class>& c, std::size_t window = 0);

struct RationalDetection {
    mpq_class value;
    std::size_t window_start = 0;  // first entry of the stable window
    std::size_t verified = 0;      // later entries that agreed
};

RationalDetection detect_rational(const std::vector<mpq_class>& seq, std::size_t window = 5);
RationalDetection detect_rational(const std::vector<BigFloat>& seq, std::size_t window = 5);

struct DenomProfile {
    std::vector<std::pair<long, double>> points;  // (n, log10 of the denominator of c_n)
    double slope = 0, intercept = 0;
    bool super_linear = false;
};

DenomProfile denom_profile(const std::vector<mpq_class>& s, long offset = 0);
std::string denom_svg(const DenomProfile& p);

// ---- series maps ---------------------------------------------------------

// s(y / (1 - beta y))
template <class T>
std::vector<T> euler_transform(const std::vector<T>& s, const T& beta) {
    std::vector<T> t(s.size(), s.empty() ? T{} : s[0] - s[0]);
    if (s.empty()) return t;
    t[0] = s[0];
    // t_m = sum_k s_k C(m-1, k-1) beta^(m-k)
    std::vector<T> bpow(s.size());
    bpow[0] = Scalar<T>::from_int(1, s[0]);
    for (std::size_t i = 1; i < s.size(); ++i) bpow[i] = bpow[i - 1] * beta;
    std::vector<T> binom_row{Scalar<T>::from_int(1, s[0])};  // C(m-1, j)
    for (std::size_t m = 1; m < s.size(); ++m) {
        if (m > 1) {
            std::vector<T> next(m, binom_row[0]);
            for (std::size_t j = 1; j + 1 < m; ++j) next[j] = binom_row[j - 1] + binom_row[j];
            next[m - 1] = binom_row[0];
            binom_row = std::move(next);
        }
        T acc = s[0] - s[0];
        for (std::size_t k = 1; k <= m; ++k) acc = acc + s[k] * binom_row[k - 1] * bpow[m - k];
        t[m] = acc;
    }
    return t;
}

// s(w) with w = num(x)/den(x); the map must vanish at 0 with nonzero slope
std::vector<mpq_class> substitute_variable(const std::vector<mpq_class>& s, const Poly<mpq_class>& num,
                                           const Poly<mpq_class>& den);

// ---- amplitude -----------------------------------------------------------

struct AmplitudeModel {
    mpq_class gamma;
    int log_depth = 0;  // 0 or 1
    BigFloat ws;
    int corrections = 3;
};

struct AmplitudeFit {
    BigFloat amplitude;
    BigFloat error;
    std::vector<BigFloat> corrections;
    std::size_t window_start = 0;
    bool consistent_with_zero = false;
};

// c_n ~ A b_n (1 + sum_k d_k / ((n-g-1)...(n-g-k))), b_n = [w^n](1 - w/ws)^g ln^l(1 - w/ws)
AmplitudeFit fit_amplitude(const std::vector<BigFloat>& c, const AmplitudeModel& m);
AmplitudeFit fit_amplitude(const std::vector<mpq_class>& c, const AmplitudeModel& m);
BigFloat model_coefficient(const AmplitudeModel& m, long n);

// ---- local bases and matching --------------------------------------------

// x = side * scale * (w - center); side +1 looks right of the center
struct Frame {
    mpq_class center = 0;
    int side = 1;
    mpq_class scale = 1;

    mpq_class sigma() const { return scale * side; }
    std::string label() const;
};

struct LocalBasis {
    Frame frame;
    ThetaOpQ local;
    FrobeniusBasis<mpq_class> basis;
    double radius = 0;  // in w, to the nearest other singular point (inf when none)
};

// Moduli |root - center| of the other finite singular points.
double singular_radius(const ThetaOpQ& op, const mpq_class& center);
std::vector<std::pair<long double, long double>> head_roots(const ThetaOpQ& op);

LocalBasis local_basis(const ThetaOpQ& op, const Frame& f, std::size_t count, int depth_budget = 4);

// d^k/dw^k of every basis solution at w, k = 0..orders-1, including a tail
// bound from the truncation.
std::vector<std::vector<BigFloat>> basis_jets(const LocalBasis& b, const BigFloat& w, int orders);

struct MatchOptions {
    std::optional<mpq_class> midpoint;
    std::size_t count_a = 0, count_b = 0;  // 0: from the requested digits
    int depth_budget = 4;
};

struct Connection {
    // solution j of frame A = sum_k matrix[j][k] * solution k of frame B
    std::vector<std::vector<BigFloat>> matrix;
    mpq_class midpoint;
    double residual_log10 = 0;
    double condition = 0;
    double achieved_digits = 0;
    std::size_t count_a = 0, count_b = 0;
    std::vector<std::string> labels_a, labels_b;
};

Connection match_solutions(const ThetaOpQ& op, const Frame& a, const Frame& b, unsigned digits,
                           const MatchOptions& opt = {});

std::string basis_label(const LogSolution& s);

// ---- continuation along a path ------------------------------------------

struct Leg {
    mpq_class center;
    long winding = 1;
    mpq_class scale = 1;
};

struct ContinuationPath {
    std::vector<Leg> legs;
    std::optional<mpq_class> target;
    mpq_class target_scale = 1;
};

// "1/4:n=3;2/5:m=1" with optional "@scale" after the center
ContinuationPath parse_path(const std::string& text);

struct SingularPart {
    mpq_class exponent;
    int depth = 0;
    std::string param;
    BigComplex amplitude;
};

struct ContinuationResult {
    Frame frame;
    std::vector<std::string> labels;
    std::vector<BigComplex> coords;
    std::vector<SingularPart> singular;
    double achieved_digits = 0;
};

// Coordinates of the continued solution in the frame on the other side of
// the center after n half-turns: x -> e^{i pi n} x', ln x -> ln x' + i pi n.
std::vector<std::vector<BigComplex>> winding_matrix(const LocalBasis& from, const LocalBasis& to, long n);

ContinuationResult continue_along_path(const ThetaOpQ& op, const Frame& start, const std::vector<BigComplex>& coords,
                                       const ContinuationPath& path, unsigned digits, const MatchOptions& opt = {});

struct SweepRow {
    long n;
    ContinuationResult result;
};

// Same path with leg `leg` given each winding in `ns`.
std::vector<SweepRow> winding_sweep(const ThetaOpQ& op, const Frame& start, const std::vector<BigComplex>& coords,
                                    const ContinuationPath& path, std::size_t leg, const std::vector<long>& ns,
                                    unsigned digits, const MatchOptions& opt = {});
std::string format_sweep(const std::vector<SweepRow>& rows);

// Coefficients a_0..a_d of the interpolating polynomial sum_k a_k n^k.
std::vector<BigComplex> fit_polynomial_in_n(const std::vector<long>& ns, const std::vector<BigComplex>& values,
                                            int degree);

// ---- elliptic branches ---------------------------------------------------

// (2/pi) K(k) and (2/pi) E(k) coefficients in k^2
std::vector<mpq_class> elliptic_k_coeffs(std::size_t count);
std::vector<mpq_class> elliptic_e_coeffs(std::size_t count);
BigFloat elliptic_k(const BigFloat& k);
BigFloat elliptic_e(const BigFloat& k);

struct EllipticBranch {
    long n = 1;
    BigFloat w, u, uprime;
    BigFloat K_u, K_up, E_u, E_up;
    BigComplex K_cont;   // continued K(4w)
    BigComplex EK_cont;  // continued E(4w) - K(4w)
    std::vector<mpq_class> k_series, e_series;  // coefficients in u^2 used above
    BigFloat legendre_residual;
};

// Beyond w = 1/4 with u = 1/(4w): K(4w) -> u[K(u) + i n K(u')],
// E(4w) - K(4w) -> [E(u) - K(u) - i n E(u')]/u.
EllipticBranch elliptic_continue(long n, const mpq_class& w, unsigned digits);

// ln(y/4) -> ln(|y|/4) - i n pi
BigComplex log_branch(const BigFloat& y, long n);

}  // namespace odeforge
