#include "odeforge/continuation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace odeforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log10_z(const mpz_class& z) {
    if (z == 0) return -kInf;
    long e;
    double d = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log10(std::fabs(d)) + double(e) * std::log10(2.0);
}

double log10_q(const mpq_class& q) { return log10_z(q.get_num()) - log10_z(q.get_den()); }

// least squares y ~ a + b t
std::pair<double, double> line_fit(const std::vector<double>& t, const std::vector<double>& y) {
    double n = double(t.size()), st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    double det = n * stt - st * st;
    if (det == 0) return {sy / n, 0};
    return {(stt * sy - st * sty) / det, (n * sty - st * sy) / det};
}

double magnitude(const BigFloat& x) { return x.log10_abs(); }
double magnitude(const BigComplex& z) { return std::max(z.re.log10_abs(), z.im.log10_abs()); }

// Solves m x = rhs column by column; pivots by magnitude.
template <class T>
std::vector<std::vector<T>> solve_linear(std::vector<std::vector<T>> m, std::vector<std::vector<T>> rhs) {
    std::size_t n = m.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (magnitude(m[r][c]) > magnitude(m[piv][c])) piv = r;
        if (magnitude(m[piv][c]) == -kInf) throw IllConditioned(0);
        std::swap(m[c], m[piv]);
        std::swap(rhs[c], rhs[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (magnitude(m[r][c]) == -kInf) continue;
            T f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] = m[r][k] - f * m[c][k];
            for (std::size_t k = 0; k < rhs[r].size(); ++k) rhs[r][k] = rhs[r][k] - f * rhs[c][k];
        }
    }
    std::size_t cols = rhs.empty() ? 0 : rhs[0].size();
    std::vector<std::vector<T>> x(n, std::vector<T>(cols));
    for (std::size_t k = 0; k < cols; ++k)
        for (std::size_t i = n; i-- > 0;) {
            T s = rhs[i][k];
            for (std::size_t j = i + 1; j < n; ++j) s = s - m[i][j] * x[j][k];
            x[i][k] = s / m[i][i];
        }
    return x;
}

std::vector<BigFloat> to_big(const std::vector<mpq_class>& c) {
    std::vector<BigFloat> out;
    out.reserve(c.size());
    for (const auto& q : c) out.emplace_back(q);
    return out;
}

}  // namespace

// ---- matching point ------------------------------------------------------

OptMatch optimize_match_point(double Nw, double Ny, double ry, MatchMode mode) {
    if (!(Nw > 0) || !(Ny > 0) || !(ry > 0) || !std::isfinite(Nw) || !std::isfinite(Ny) || !std::isfinite(ry))
        throw NoRoot("match point needs positive finite Nw, Ny, ry");
    auto f = [&](long double t) {  // t = ln y
        long double y = std::exp(t);
        long double lhs = mode == MatchMode::linear ? 2.0L * Nw * y : 2.0L * Nw * std::sqrt(y);
        return lhs - (long double)Ny * (std::log((long double)ry) - t);
    };
    long double hi = std::log((long double)ry), lo = hi - 1400.0L;
    if (f(lo) >= 0 || f(hi) <= 0) throw NoRoot("no sign change on (0, ry)");
    for (int i = 0; i < 200; ++i) {
        long double mid = (lo + hi) / 2;
        (f(mid) < 0 ? lo : hi) = mid;
    }
    OptMatch r;
    long double t = (lo + hi) / 2;
    r.ym = double(std::exp(t));
    r.digits = double((long double)Ny * (std::log((long double)ry) - t) / std::log(10.0L));
    return r;
}

// ---- radius --------------------------------------------------------------

RadiusReport radius_estimate(const std::vector<BigFloat>& c, std::size_t window) {
    std::vector<std::size_t> nz;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!c[i].is_zero()) nz.push_back(i);
    if (nz.size() < 20) throw TooFewTerms("radius estimate needs at least 20 nonzero coefficients");
    RadiusReport rep;
    if (window == 0) window = std::max<std::size_t>(10, nz.size() / 2);
    window = std::min(window, nz.size() - 3);
    std::size_t first = nz.size() - window;

    int pos = 0, neg = 0, flips = 0, runs = 0;
    for (std::size_t k = first; k < nz.size(); ++k) {
        int s = c[nz[k]].value() > 0 ? 1 : -1;
        (s > 0 ? pos : neg)++;
        if (k > first) {
            int s0 = c[nz[k - 1]].value() > 0 ? 1 : -1;
            if (s != s0) ++flips;
            else ++runs;
        }
    }
    if (pos == 0 || neg == 0) rep.sign_pattern = "constant";
    else if (runs == 0) rep.sign_pattern = "alternating";
    else rep.sign_pattern = "irregular";
    rep.oscillating = rep.sign_pattern != "constant";

    std::vector<double> t, y;
    bool contiguous = nz.back() - nz[first] == window - 1;
    if (rep.sign_pattern == "irregular" && contiguous && nz[first] >= 1) {
        // complex conjugate pair: R^2 from three-term ratios
        rep.method = "squared-ratio";
        PrecisionScope ps(40);
        for (std::size_t n = nz[first]; n + 2 <= nz.back(); ++n) {
            BigFloat num = c[n] * c[n] - c[n + 1] * c[n - 1];
            BigFloat den = c[n + 1] * c[n + 1] - c[n + 2] * c[n];
            if (den.is_zero() || num.is_zero()) continue;
            double r2 = (num / den).to_double();
            if (!(r2 > 0) || !std::isfinite(r2)) continue;
            t.push_back(1.0 / double(n));
            y.push_back(std::sqrt(r2));
        }
    } else {
        rep.method = "ratio";
        for (std::size_t k = first; k + 1 < nz.size(); ++k) {
            std::size_t a = nz[k], b = nz[k + 1];
            double lr = (c[a].log10_abs() - c[b].log10_abs()) / double(b - a);
            t.push_back(1.0 / double(a));
            y.push_back(std::pow(10.0, lr));
        }
    }
    if (t.size() < 6) throw TooFewTerms("too few usable ratios");
    auto fit = [](const std::vector<double>& tt, const std::vector<double>& yy) {
        // r ~ R + a/n + b/n^2
        long double G[3][4] = {};
        for (std::size_t i = 0; i < tt.size(); ++i) {
            long double ph[3] = {1, tt[i], (long double)tt[i] * tt[i]};
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) G[r][c] += ph[r] * ph[c];
                G[r][3] += ph[r] * yy[i];
            }
        }
        for (int c = 0; c < 3; ++c)
            for (int r = c + 1; r < 3; ++r) {
                long double f = G[r][c] / G[c][c];
                for (int k = c; k < 4; ++k) G[r][k] -= f * G[c][k];
            }
        long double x[3];
        for (int r = 2; r >= 0; --r) {
            long double acc = G[r][3];
            for (int k = r + 1; k < 3; ++k) acc -= G[r][k] * x[k];
            x[r] = acc / G[r][r];
        }
        return std::array<double, 3>{double(x[0]), double(x[1]), double(x[2])};
    };
    auto full = fit(t, y);
    double R = full[0];
    double ss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) ss += std::pow(y[i] - R - full[1] * t[i] - full[2] * t[i] * t[i], 2);
    std::size_t h = t.size() / 2;
    auto half = fit(std::vector<double>(t.begin() + long(h), t.end()), std::vector<double>(y.begin() + long(h), y.end()));
    rep.radius = R;
    rep.error = std::sqrt(ss / double(t.size())) + 3 * std::fabs(R - half[0]);
    rep.used = t.size();
    return rep;
}

RadiusReport radius_estimate(const std::vector<mpq_class>& c, std::size_t window) {
    PrecisionScope ps(40);
    return radius_estimate(to_big(c), window);
}

// ---- rational detection --------------------------------------------------

namespace {

struct Expansion {
    std::vector<mpq_class> conv;  // convergents, shallow to deep
    mpq_class x;
    double tol;                   // log10 of the entry's own uncertainty
};

// convergents of x, stopping at the first one within 10^tol of x
Expansion expand(const mpq_class& x, double tol) {
    Expansion e{{}, x, tol};
    mpz_class p0 = 1, q0 = 0, p1 = 0, q1 = 1;
    mpq_class r = x;
    for (int k = 0; k < 2000; ++k) {
        mpz_class ak;
        mpz_fdiv_q(ak.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
        mpz_class p = ak * p0 + p1, q = ak * q0 + q1;
        e.conv.emplace_back(p, q);
        e.conv.back().canonicalize();
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
        if (log10_q(mpq_class(x - e.conv.back())) <= tol) break;
        mpq_class frac = r - mpq_class(ak);
        if (frac == 0) break;
        r = 1 / frac;
    }
    return e;
}

bool has_convergent(const Expansion& e, const mpq_class& v) {
    return std::find(e.conv.begin(), e.conv.end(), v) != e.conv.end();
}

// Candidate: the deepest convergent shared by the last window+1 entries.  Its
// distance to the entries must shrink and the margin log10(1/(q^2 d)) grow,
// ending at 1.5 or more, unless the entries already agree within precision.
RationalDetection detect_from(const std::vector<Expansion>& ex, std::size_t window) {
    if (window < 2) window = 2;
    if (ex.size() < std::max<std::size_t>(6, window + 1)) throw NoStableRational("need at least 6 entries");
    std::size_t first = ex.size() - window - 1;
    const Expansion& last = ex.back();
    std::optional<mpq_class> cand;
    for (std::size_t k = last.conv.size(); k-- > 0 && !cand;) {
        bool shared = true;
        for (std::size_t t = first; t + 1 < ex.size() && shared; ++t) shared = has_convergent(ex[t], last.conv[k]);
        if (shared) cand = last.conv[k];
    }
    if (!cand) throw NoStableRational("entries share no convergent");
    const mpq_class v = *cand;
    double lq2 = 2 * log10_z(v.get_den());
    auto dist = [&](std::size_t t) { return log10_q(mpq_class(ex[t].x - v)); };
    auto consistent = [&](std::size_t t) { return dist(t) <= ex[t].tol; };
    for (std::size_t t = first + 1; t < ex.size(); ++t) {
        if (consistent(t)) continue;
        if (!(dist(t) < dist(t - 1))) throw NoStableRational("distance to the candidate does not shrink");
    }
    if (!consistent(ex.size() - 1) && -(lq2 + dist(ex.size() - 1)) < 1.5)
        throw NoStableRational("candidate " + v.get_str() + " is not separated from the data");
    std::size_t start = first;
    while (start > 0 && has_convergent(ex[start - 1], v) &&
           (consistent(start) || dist(start) < dist(start - 1)))
        --start;
    return {v, start, ex.size() - start - window};
}

}  // namespace

RationalDetection detect_rational(const std::vector<mpq_class>& seq, std::size_t window) {
    std::vector<Expansion> ex;
    for (const auto& x : seq) ex.push_back(expand(x, -kInf));
    return detect_from(ex, window);
}

RationalDetection detect_rational(const std::vector<BigFloat>& seq, std::size_t window) {
    std::vector<Expansion> ex;
    for (const auto& x : seq) {
        double tol = x.log10_error();
        if (x.exact()) tol = x.log10_abs() - double(working_digits());
        ex.push_back(expand(x.to_mpq(), tol));
    }
    return detect_from(ex, window);
}

// ---- denominators --------------------------------------------------------

DenomProfile denom_profile(const std::vector<mpq_class>& s, long offset) {
    DenomProfile p;
    for (std::size_t i = 0; i < s.size(); ++i) p.points.emplace_back(long(i) + offset, log10_z(s[i].get_den()));
    if (p.points.size() < 4) return p;
    auto fit = [](const std::vector<std::pair<long, double>>& pts) {
        std::vector<double> t, y;
        for (auto& [n, v] : pts) {
            t.push_back(double(n));
            y.push_back(v);
        }
        return line_fit(t, y);
    };
    auto all = fit(p.points);
    p.intercept = all.first;
    p.slope = all.second;
    std::size_t h = p.points.size() / 2;
    auto a = fit({p.points.begin(), p.points.begin() + long(h)});
    auto b = fit({p.points.begin() + long(h), p.points.end()});
    p.super_linear = b.second > 1.25 * a.second + 0.05;
    return p;
}

std::string denom_svg(const DenomProfile& p) {
    const double W = 640, H = 400, pad = 40;
    double nmin = 0, nmax = 1, vmax = 1;
    if (!p.points.empty()) {
        nmin = double(p.points.front().first);
        nmax = std::max(nmin + 1, double(p.points.back().first));
        for (auto& pt : p.points) vmax = std::max(vmax, pt.second);
    }
    auto X = [&](double n) { return pad + (n - nmin) / (nmax - nmin) * (W - 2 * pad); };
    auto Y = [&](double v) { return H - pad - v / vmax * (H - 2 * pad); };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
    o << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
    for (auto& [n, v] : p.points) o << X(double(n)) << "," << Y(v) << " ";
    o << "\"/>\n";
    o << "<line x1=\"" << X(nmin) << "\" y1=\"" << Y(p.intercept + p.slope * nmin) << "\" x2=\"" << X(nmax)
      << "\" y2=\"" << Y(p.intercept + p.slope * nmax) << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
    o << "<text x=\"" << pad << "\" y=\"" << pad / 2 << "\" font-size=\"12\">log10 den vs n, slope " << p.slope
      << (p.super_linear ? ", super-linear" : "") << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

// ---- substitution --------------------------------------------------------

std::vector<mpq_class> substitute_variable(const std::vector<mpq_class>& s, const Poly<mpq_class>& num,
                                           const Poly<mpq_class>& den) {
    std::size_t N = s.size();
    if (den.empty() || den[0] == 0) throw BadMap("denominator vanishes at 0");
    if (!num.empty() && num[0] != 0) throw BadMap("map does not vanish at 0");
    if (num.size() < 2 || num[1] == 0) throw BadMap("map has zero slope at 0");
    // phi = num/den as a series
    std::vector<mpq_class> phi(N, mpq_class(0));
    for (std::size_t n = 0; n < N; ++n) {
        mpq_class acc = n < num.size() ? num[n] : mpq_class(0);
        for (std::size_t k = 1; k <= n && k < den.size(); ++k) acc -= den[k] * phi[n - k];
        phi[n] = acc / den[0];
    }
    std::vector<mpq_class> r(N, mpq_class(0));
    for (std::size_t k = N; k-- > 0;) {
        std::vector<mpq_class> t(N, mpq_class(0));
        for (std::size_t i = 0; i < N; ++i) {
            if (r[i] == 0) continue;
            for (std::size_t j = 1; i + j < N; ++j)
                if (phi[j] != 0) t[i + j] += r[i] * phi[j];
        }
        t[0] += s[k];
        r = std::move(t);
    }
    return r;
}

// ---- amplitude -----------------------------------------------------------

namespace {

bool is_integer(const mpq_class& q) { return q.get_den() == 1; }

// b_n for n = 0..N-1
std::vector<BigFloat> model_sequence(const AmplitudeModel& m, std::size_t N) {
    if (m.log_depth < 0 || m.log_depth > 1) throw ModelMismatch("log depth must be 0 or 1");
    if (m.ws.is_zero()) throw ModelMismatch("singularity at 0");
    std::vector<BigFloat> b(N);
    BigFloat g(m.gamma);
    if (N) b[0] = BigFloat(1);
    for (std::size_t n = 1; n < N; ++n) b[n] = b[n - 1] * (BigFloat(long(n) - 1) - g) / (BigFloat(long(n)) * m.ws);
    if (m.log_depth == 0) {
        if (is_integer(m.gamma) && m.gamma >= 0)
            throw ModelMismatch("nonnegative integer exponent without a logarithm has no singular tail");
        return b;
    }
    std::vector<BigFloat> l(N);
    if (is_integer(m.gamma) && m.gamma >= 0) {
        // [x^n] (1-x)^g ln(1-x) = (-1)^(g+1) g! (n-g-1)! / n!  for n > g
        long g0 = m.gamma.get_num().get_si();
        BigFloat f(1);
        for (long k = 2; k <= g0; ++k) f = f * BigFloat(k);
        if (g0 % 2 == 0) f = -f;
        BigFloat wpow(1);
        BigFloat v;  // (n-g-1)!/n!
        for (std::size_t n = 0; n < N; ++n) {
            if (n > 0) wpow = wpow * m.ws;
            if (long(n) <= g0) continue;
            if (long(n) == g0 + 1) {
                v = BigFloat(1);
                for (long k = 2; k <= long(n); ++k) v = v / BigFloat(k);
            } else {
                v = v * BigFloat(long(n) - g0 - 1) / BigFloat(long(n));
            }
            l[n] = f * v / wpow;
        }
        return l;
    }
    BigFloat H;
    for (std::size_t n = 0; n < N; ++n) {
        l[n] = -b[n] * H;
        H = H + BigFloat(1) / (BigFloat(long(n)) - g);
    }
    return l;
}

struct WindowFit {
    BigFloat A;
    std::vector<BigFloat> d;
};

WindowFit window_fit(const std::vector<BigFloat>& r, const mpq_class& gamma, std::size_t lo, std::size_t hi, int K) {
    std::size_t cols = std::size_t(K) + 1;
    BigFloat g(gamma);
    std::vector<std::vector<BigFloat>> G(cols, std::vector<BigFloat>(cols));
    std::vector<std::vector<BigFloat>> h(cols, std::vector<BigFloat>(1));
    for (std::size_t n = lo; n < hi; ++n) {
        std::vector<BigFloat> phi(cols);
        phi[0] = BigFloat(1);
        BigFloat prod(1);
        for (std::size_t k = 1; k < cols; ++k) {
            prod = prod * (BigFloat(long(n) - long(k)) - g);
            phi[k] = BigFloat(1) / prod;
        }
        for (std::size_t i = 0; i < cols; ++i) {
            h[i][0] = h[i][0] + phi[i] * r[n];
            for (std::size_t j = 0; j < cols; ++j) G[i][j] = G[i][j] + phi[i] * phi[j];
        }
    }
    auto x = solve_linear(G, h);
    WindowFit f;
    f.A = x[0][0];
    for (std::size_t k = 1; k < cols; ++k) f.d.push_back(x[k][0]);
    return f;
}

}  // namespace

BigFloat model_coefficient(const AmplitudeModel& m, long n) {
    if (n < 0) return BigFloat();
    return model_sequence(m, std::size_t(n) + 1).back();
}

AmplitudeFit fit_amplitude(const std::vector<BigFloat>& c, const AmplitudeModel& m) {
    std::size_t N = c.size();
    int K = std::max(0, m.corrections);
    if (N < std::size_t(4 * (K + 2))) throw TooFewTerms("amplitude fit needs more coefficients");
    PrecisionScope ps(std::max(80u, working_digits()));
    auto b = model_sequence(m, N);
    std::vector<BigFloat> r(N);
    std::size_t lo1 = N / 2, lo2 = 3 * N / 4;
    double S = -kInf;
    for (std::size_t n = lo1; n < N; ++n) {
        if (b[n].is_zero()) throw ModelMismatch("model coefficient vanishes in the fit window");
        r[n] = c[n] / b[n];
        S = std::max(S, r[n].log10_abs());
    }
    auto f1 = window_fit(r, m.gamma, lo1, N, K);
    auto f2 = window_fit(r, m.gamma, lo2, N, K);
    BigFloat diff = abs(f1.A - f2.A);
    double ld = std::max(diff.log10_abs(), f1.A.log10_error());
    double la = f1.A.log10_abs();
    AmplitudeFit out;
    out.amplitude = f1.A;
    out.corrections = f1.d;
    out.window_start = lo1;
    double late = -kInf;
    for (std::size_t n = lo2; n < N; ++n) late = std::max(late, r[n].log10_abs());
    bool small_diff = ld <= S - 6;
    // a zero amplitude leaves a ratio that dies off across the window
    bool tail_vanishes = late <= S - 6;
    if (!small_diff && (la > ld + 1 || !tail_vanishes)) throw ModelMismatch("amplitude drifts between fit windows");
    out.consistent_with_zero = la <= ld + 1;
    double lerr = log10_sum(ld, f1.A.log10_error());
    if (out.consistent_with_zero) lerr = log10_sum(lerr, la);
    out.error = BigFloat(boost::multiprecision::pow(mpfr_float(10), mpfr_float(lerr)), -kInf);
    return out;
}

AmplitudeFit fit_amplitude(const std::vector<mpq_class>& c, const AmplitudeModel& m) {
    PrecisionScope ps(std::max(80u, working_digits()));
    return fit_amplitude(to_big(c), m);
}

// ---- local bases ---------------------------------------------------------

std::string Frame::label() const {
    std::string s = center.get_str() + (side > 0 ? "+" : "-");
    if (scale != 1) s += "@" + scale.get_str();
    return s;
}

std::vector<std::pair<long double, long double>> head_roots(const ThetaOpQ& op) {
    using C = std::complex<long double>;
    auto d = to_dform(op);
    // drop factors shared by every coefficient (e.g. w^k from the theta form)
    Poly<mpq_class> common;
    for (const auto& bk : d.b)
        if (!bk.empty()) common = common.empty() ? bk : poly::gcd(common, bk);
    Poly<mpq_class> h = d.b.back();
    if (poly::deg(common) > 0) h = poly::divmod(h, common).first;
    Poly<mpq_class> g = poly::gcd(h, poly::deriv(h));
    if (poly::deg(g) > 0) h = poly::divmod(h, g).first;
    h = poly::monic(h);
    int n = poly::deg(h);
    std::vector<std::pair<long double, long double>> out;
    if (n <= 0) return out;
    std::vector<C> a(std::size_t(n) + 1);
    for (int i = 0; i <= n; ++i) a[std::size_t(i)] = C((long double)h[std::size_t(i)].get_d(), 0);
    auto eval = [&](C z) {
        C r = a[std::size_t(n)];
        for (int i = n - 1; i >= 0; --i) r = r * z + a[std::size_t(i)];
        return r;
    };
    long double bound = 1;
    for (int i = 0; i < n; ++i) bound = std::max(bound, 1 + std::abs(a[std::size_t(i)]));
    std::vector<C> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[std::size_t(i)] = std::pow(C(0.4L, 0.9L), i) * (bound / 2);
    for (int it = 0; it < 2000; ++it) {
        long double moved = 0;
        for (int i = 0; i < n; ++i) {
            C den = 1;
            for (int j = 0; j < n; ++j)
                if (j != i) den *= z[std::size_t(i)] - z[std::size_t(j)];
            if (std::abs(den) == 0) den = 1e-30L;
            C step = eval(z[std::size_t(i)]) / den;
            z[std::size_t(i)] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-18L) break;
    }
    for (auto& r : z) out.emplace_back(r.real(), r.imag());
    return out;
}

double singular_radius(const ThetaOpQ& op, const mpq_class& center) {
    long double c = (long double)center.get_d(), best = kInf;
    for (auto& [re, im] : head_roots(op)) {
        long double d = std::hypot(re - c, im);
        if (d > 1e-12L) best = std::min(best, d);
    }
    return double(best);
}

LocalBasis local_basis(const ThetaOpQ& op, const Frame& f, std::size_t count, int depth_budget) {
    LocalBasis b;
    b.frame = f;
    b.local = (f.center == 0 && f.sigma() == 1) ? op : recenter(op, f.center, f.sigma());
    b.basis = frobenius_solve(b.local, LocalFrame{}, count, depth_budget);
    b.radius = singular_radius(op, f.center);
    return b;
}

std::vector<std::vector<BigFloat>> basis_jets(const LocalBasis& b, const BigFloat& w, int orders) {
    BigFloat sigma(b.frame.sigma());
    BigFloat x = sigma * (w - BigFloat(b.frame.center));
    if (!(x.value() > 0)) throw DiskMismatch("point is not on the frame's side");
    double lrho = std::isinf(b.radius) ? -kInf
                                       : x.log10_abs() - std::log10(b.radius * std::fabs(b.frame.sigma().get_d()));
    if (lrho >= 0) throw DiskMismatch("point is outside the convergence disk");
    BigFloat lx = log(x);
    std::vector<std::vector<BigFloat>> jets;
    for (const auto& s : b.basis.solutions) {
        std::size_t L = std::size_t(s.depth) + 1, N = s.count();
        std::vector<BigFloat> lpow(L);
        lpow[0] = BigFloat(1);
        for (std::size_t l = 1; l < L; ++l) lpow[l] = lpow[l - 1] * lx / BigFloat(long(l));
        std::vector<BigFloat> V(static_cast<std::size_t>(orders));
        BigFloat xq = exp(BigFloat(s.exponent) * lx), xn(1);
        std::vector<double> term(N, -kInf);
        mpz_class fact = 1;
        std::vector<mpz_class> facts(L);
        for (std::size_t l = 0; l < L; ++l) {
            if (l) fact *= long(l);
            facts[l] = fact;
        }
        for (std::size_t n = 0; n < N; ++n, xn = xn * x) {
            bool any = false;
            std::vector<BigFloat> d(L);
            for (std::size_t l = 0; l < L; ++l)
                if (s.parts[l][n] != 0) {
                    d[l] = BigFloat(mpq_class(s.parts[l][n] * facts[l]));
                    any = true;
                }
            if (!any) continue;
            BigFloat xp = xq * xn;
            BigFloat qn(mpq_class(s.exponent + long(n)));
            for (int i = 0; i < orders; ++i) {
                BigFloat acc;
                for (std::size_t l = 0; l < L; ++l)
                    if (!d[l].is_zero()) acc = acc + d[l] * lpow[l];
                acc = acc * xp;
                if (i == 0) term[n] = acc.log10_abs();
                V[std::size_t(i)] = V[std::size_t(i)] + acc;
                for (std::size_t l = 0; l < L; ++l) d[l] = qn * d[l] + (l + 1 < L ? d[l + 1] : BigFloat());
            }
        }
        // truncation tail from the last few terms and the observed decay
        double last = -kInf, prev = -kInf;
        std::size_t q4 = std::max<std::size_t>(1, N / 4), w4 = std::min<std::size_t>(4, N);
        for (std::size_t n = N - w4; n < N; ++n) last = std::max(last, term[n]);
        if (N > q4 + w4)
            for (std::size_t n = N - q4 - w4; n < N - q4; ++n) prev = std::max(prev, term[n]);
        if (last > -kInf) {
            double lr = lrho;
            if (prev > -kInf) lr = std::max(lr, (last - prev) / double(q4));
            double grow = std::log10(std::fabs(s.exponent.get_d()) + double(N + L));
            for (int i = 0; i < orders; ++i) {
                double tail;
                if (lr > -1e-3) tail = last + 5 + double(i) * grow + std::log10(double(N));
                else tail = last + double(i) * grow + lr - std::log10(1 - std::pow(10.0, lr)) + 1;
                V[std::size_t(i)] = V[std::size_t(i)].widened(tail);
            }
        }
        std::vector<BigFloat> jet(static_cast<std::size_t>(orders));
        BigFloat sk(1), xk(1);
        for (int k = 0; k < orders; ++k) {
            BigFloat acc;
            for (int i = 0; i <= k; ++i) {
                long c = stirling1(k, i);
                if (c) acc = acc + BigFloat(c) * V[std::size_t(i)];
            }
            jet[std::size_t(k)] = acc * sk / xk;
            sk = sk * sigma;
            xk = xk * x;
        }
        jets.push_back(std::move(jet));
    }
    return jets;
}

std::string basis_label(const LogSolution& s) {
    std::string l = "x^" + s.exponent.get_str();
    if (s.depth > 0) l += "*ln^" + std::to_string(s.depth) + "(x)";
    return l;
}

namespace {

std::vector<std::string> labels_of(const LocalBasis& b) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < b.basis.solutions.size(); ++i)
        out.push_back(b.basis.params[i] + " " + basis_label(b.basis.solutions[i]));
    return out;
}

std::size_t auto_count(unsigned digits, double dist, double radius) {
    double lr = std::isinf(radius) ? std::log10(0.5) : std::log10(dist / radius);
    double n = std::ceil((double(digits) + 10) / -lr) + 10;
    return std::size_t(std::min(n, 5000.0));
}

double cond_estimate(const std::vector<std::vector<BigFloat>>& m) {
    std::size_t n = m.size();
    std::vector<std::vector<long double>> a(n, std::vector<long double>(2 * n, 0));
    long double norm_a = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long double row = 0;
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = (long double)m[i][j].value().convert_to<long double>();
            row += std::fabs(a[i][j]);
        }
        a[i][n + i] = 1;
        norm_a = std::max(norm_a, row);
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (a[piv][c] == 0) return kInf;
        std::swap(a[c], a[piv]);
        long double p = a[c][c];
        for (auto& v : a[c]) v /= p;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            long double f = a[r][c];
            for (std::size_t k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    long double norm_inv = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long double row = 0;
        for (std::size_t j = 0; j < n; ++j) row += std::fabs(a[i][n + j]);
        norm_inv = std::max(norm_inv, row);
    }
    return double(norm_a * norm_inv);
}

double matrix_digits(const std::vector<std::vector<BigFloat>>& m) {
    double big = -kInf, err = -kInf;
    for (auto& r : m)
        for (auto& v : r) {
            big = std::max(big, v.log10_abs());
            err = std::max(err, v.log10_error());
        }
    if (big == -kInf) return 0;
    return big - err;
}

double coords_digits(const std::vector<BigComplex>& v) {
    double big = -kInf, err = -kInf;
    for (auto& z : v) {
        big = std::max({big, z.re.log10_abs(), z.im.log10_abs()});
        err = std::max({err, z.re.log10_error(), z.im.log10_error()});
    }
    if (big == -kInf) return kInf;
    return big - err;
}

}  // namespace

Connection match_solutions(const ThetaOpQ& op, const Frame& a, const Frame& b, unsigned digits,
                           const MatchOptions& opt) {
    if (a.center == b.center) throw DiskMismatch("frames share a center; use a winding instead");
    double Ra = singular_radius(op, a.center), Rb = singular_radius(op, b.center);
    double dist = std::fabs(mpq_class(b.center - a.center).get_d());
    mpq_class m;
    if (opt.midpoint) {
        m = *opt.midpoint;
    } else {
        double ra = std::min(Ra, dist), rb = std::min(Rb, dist);
        double t = ra / (ra + rb);
        mpq_class tq(long(std::llround(t * 1e6)), 1000000);
        tq.canonicalize();
        m = a.center + (b.center - a.center) * tq;
    }
    double da = std::fabs(mpq_class(m - a.center).get_d()), db = std::fabs(mpq_class(m - b.center).get_d());
    if (!(da < Ra) || !(db < Rb)) throw DiskMismatch("matching point is outside a convergence disk");
    if (sgn(mpq_class(a.sigma() * (m - a.center))) <= 0 || sgn(mpq_class(b.sigma() * (m - b.center))) <= 0)
        throw DiskMismatch("matching point is not on the frame's side");

    Connection con;
    con.midpoint = m;
    con.count_a = opt.count_a ? opt.count_a : auto_count(digits, da, Ra);
    con.count_b = opt.count_b ? opt.count_b : auto_count(digits, db, Rb);
    auto A = local_basis(op, a, con.count_a, opt.depth_budget);
    auto B = local_basis(op, b, con.count_b, opt.depth_budget);
    con.labels_a = labels_of(A);
    con.labels_b = labels_of(B);

    PrecisionScope ps(digits + 30);
    int M = op.order();
    BigFloat wm(m);
    auto JA = basis_jets(A, wm, M + 2);
    auto JB = basis_jets(B, wm, M + 2);
    std::size_t n = std::size_t(M);
    if (JA.size() != n || JB.size() != n) throw NotComputable("local basis is incomplete");
    std::vector<std::vector<BigFloat>> W(n, std::vector<BigFloat>(n)), rhs(n, std::vector<BigFloat>(n));
    for (std::size_t d = 0; d < n; ++d)
        for (std::size_t k = 0; k < n; ++k) {
            W[d][k] = JB[k][d];
            rhs[d][k] = JA[k][d];
        }
    auto X = solve_linear(W, rhs);  // X[k][j] = C_jk
    con.matrix.assign(n, std::vector<BigFloat>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) con.matrix[j][k] = X[k][j];

    con.residual_log10 = -kInf;
    for (std::size_t d = n; d < n + 2; ++d)
        for (std::size_t j = 0; j < n; ++j) {
            BigFloat acc;
            double scale = JA[j][d].log10_abs();
            for (std::size_t k = 0; k < n; ++k) {
                BigFloat t = con.matrix[j][k] * JB[k][d];
                scale = std::max(scale, t.log10_abs());
                acc = acc + t;
            }
            BigFloat r = acc - JA[j][d];
            if (!r.is_zero() && scale > -kInf) con.residual_log10 = std::max(con.residual_log10, r.log10_abs() - scale);
        }
    con.condition = cond_estimate(W);
    con.achieved_digits = std::min(matrix_digits(con.matrix), -con.residual_log10);
    if (con.achieved_digits < double(digits)) throw IllConditioned(con.achieved_digits);
    return con;
}

// ---- winding -------------------------------------------------------------

ContinuationPath parse_path(const std::string& text) {
    ContinuationPath path;
    std::stringstream ss(text);
    std::string item;
    auto parse_num = [](std::string t) {
        t.erase(0, t.find_first_not_of(" \t"));
        t.erase(t.find_last_not_of(" \t") + 1);
        if (t.empty()) throw FormatError("empty number in path");
        auto dot = t.find('.');
        if (dot == std::string::npos) {
            mpq_class q;
            if (q.set_str(t, 10) != 0) throw FormatError("bad number in path: " + t);
            q.canonicalize();
            return q;
        }
        // decimals are read as exact rationals
        bool neg = t[0] == '-';
        std::string body = neg || t[0] == '+' ? t.substr(1) : t;
        dot = body.find('.');
        std::string digits = body.substr(0, dot) + body.substr(dot + 1);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw FormatError("bad number in path: " + t);
        mpz_class num(digits, 10), den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, body.size() - dot - 1);
        mpq_class q(num, den);
        q.canonicalize();
        return neg ? mpq_class(-q) : q;
    };
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        auto colon = item.find(':');
        std::string head = item.substr(0, colon);
        mpq_class scale = 1;
        auto at = head.find('@');
        if (at != std::string::npos) {
            scale = parse_num(head.substr(at + 1));
            head = head.substr(0, at);
        }
        if (colon == std::string::npos) {
            if (path.target) throw FormatError("path has two targets");
            path.target = parse_num(head);
            path.target_scale = scale;
            continue;
        }
        if (path.target) throw FormatError("target must be last in a path");
        std::string w = item.substr(colon + 1);
        auto eq = w.find('=');
        std::string val = eq == std::string::npos ? w : w.substr(eq + 1);
        Leg leg;
        leg.center = parse_num(head);
        leg.scale = scale;
        try {
            leg.winding = std::stol(val);
        } catch (const std::exception&) {
            throw FormatError("bad winding in path: " + item);
        }
        path.legs.push_back(leg);
    }
    if (path.legs.empty() && !path.target) throw FormatError("empty path");
    return path;
}

std::vector<std::vector<BigComplex>> winding_matrix(const LocalBasis& from, const LocalBasis& to, long n) {
    if (n % 2 == 0) throw EvenWinding("winding number must be odd, got " + std::to_string(n));
    if (from.frame.center != to.frame.center || from.frame.side != -to.frame.side ||
        from.frame.scale != to.frame.scale)
        throw DiskMismatch("winding needs the two sides of one center");
    BigFloat pin = BigFloat::pi() * BigFloat(n);
    const auto& sols = from.basis.solutions;
    const auto& tb = to.basis;
    std::vector<std::vector<BigComplex>> W(sols.size(), std::vector<BigComplex>(tb.solutions.size()));
    for (std::size_t j = 0; j < sols.size(); ++j) {
        const auto& s = sols[j];
        BigComplex phase = expi(BigFloat(s.exponent) * pin);
        for (std::size_t b = 0; b < tb.solutions.size(); ++b) {
            mpq_class diff = tb.solutions[b].exponent - s.exponent;
            if (diff.get_den() != 1 || diff < 0) continue;
            long m = diff.get_num().get_si();
            if (std::size_t(m) >= s.count()) throw NotComputable("local basis too short for the winding");
            int l = tb.param_level[b];
            BigComplex sum;
            BigFloat pw(1);  // (pi n)^(l'-l)
            mpz_class binom = 1;
            for (int lp = l; lp <= s.depth; ++lp) {
                if (lp > l) {
                    pw = pw * pin;
                    binom = binom * lp / (lp - l);
                }
                const mpq_class& c = s.parts[std::size_t(lp)][std::size_t(m)];
                if (c == 0) continue;
                BigFloat v = BigFloat(mpq_class(c * binom)) * pw;
                if (m % 2) v = -v;
                switch ((lp - l) % 4) {
                    case 0: sum.re = sum.re + v; break;
                    case 1: sum.im = sum.im + v; break;
                    case 2: sum.re = sum.re - v; break;
                    default: sum.im = sum.im - v; break;
                }
            }
            BigFloat lf(1);
            for (int k = 2; k <= l; ++k) lf = lf * BigFloat(long(k));
            W[j][b] = phase * sum * BigComplex(lf);
        }
    }
    return W;
}

namespace {

std::size_t winding_count(const ThetaOpQ& op, const Frame& f, int depth_budget) {
    auto probe = local_basis(op, f, 2, depth_budget);
    long span = 0;
    for (auto& a : probe.basis.solutions)
        for (auto& b : probe.basis.solutions) {
            mpq_class d = b.exponent - a.exponent;
            if (d.get_den() == 1 && d > 0) span = std::max(span, d.get_num().get_si());
        }
    return std::size_t(span) + 2;
}

std::vector<BigComplex> apply_real(const std::vector<BigComplex>& v, const std::vector<std::vector<BigFloat>>& C) {
    std::size_t n = C.empty() ? 0 : C[0].size();
    std::vector<BigComplex> out(n);
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t k = 0; k < n; ++k) out[k] = out[k] + v[j] * BigComplex(C[j][k]);
    return out;
}

std::vector<BigComplex> apply_complex(const std::vector<BigComplex>& v, const std::vector<std::vector<BigComplex>>& C) {
    std::size_t n = C.empty() ? 0 : C[0].size();
    std::vector<BigComplex> out(n);
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t k = 0; k < n; ++k) out[k] = out[k] + v[j] * C[j][k];
    return out;
}

}  // namespace

ContinuationResult continue_along_path(const ThetaOpQ& op, const Frame& start, const std::vector<BigComplex>& coords,
                                       const ContinuationPath& path, unsigned digits, const MatchOptions& opt) {
    if (coords.size() != std::size_t(op.order())) throw FormatError("need one coordinate per basis solution");
    PrecisionScope ps(digits + 30);
    Frame F = start;
    std::vector<BigComplex> v = coords;
    double achieved = kInf;
    auto hop = [&](const Frame& G) {
        if (G.center == F.center && G.side == F.side && G.scale == F.scale) return;
        MatchOptions o = opt;
        o.midpoint.reset();
        auto con = match_solutions(op, F, G, digits, o);
        achieved = std::min(achieved, con.achieved_digits);
        v = apply_real(v, con.matrix);
        F = G;
    };
    for (const auto& leg : path.legs) {
        int s = F.center == leg.center ? F.side : sgn(mpq_class(F.center - leg.center));
        hop(Frame{leg.center, s, leg.scale});
        std::size_t cnt = winding_count(op, F, opt.depth_budget);
        auto from = local_basis(op, F, cnt, opt.depth_budget);
        Frame G{leg.center, -s, leg.scale};
        auto to = local_basis(op, G, cnt, opt.depth_budget);
        v = apply_complex(v, winding_matrix(from, to, leg.winding));
        F = G;
    }
    if (path.target) {
        int s = *path.target == F.center ? F.side : sgn(mpq_class(F.center - *path.target));
        hop(Frame{*path.target, s, path.target_scale});
    }
    ContinuationResult res;
    res.frame = F;
    auto fin = local_basis(op, F, winding_count(op, F, opt.depth_budget), opt.depth_budget);
    res.labels = labels_of(fin);
    res.coords = v;
    for (std::size_t b = 0; b < fin.basis.solutions.size(); ++b) {
        const auto& s = fin.basis.solutions[b];
        bool analytic = s.depth == 0 && s.exponent.get_den() == 1 && s.exponent >= 0;
        if (analytic) continue;
        res.singular.push_back({s.exponent, s.depth, fin.basis.params[b], v[b]});
    }
    res.achieved_digits = std::min(achieved, coords_digits(v));
    return res;
}

std::vector<SweepRow> winding_sweep(const ThetaOpQ& op, const Frame& start, const std::vector<BigComplex>& coords,
                                    const ContinuationPath& path, std::size_t leg, const std::vector<long>& ns,
                                    unsigned digits, const MatchOptions& opt) {
    if (leg >= path.legs.size()) throw FormatError("sweep leg out of range");
    std::vector<SweepRow> rows;
    for (long n : ns) {
        ContinuationPath p = path;
        p.legs[leg].winding = n;
        rows.push_back({n, continue_along_path(op, start, coords, p, digits, opt)});
    }
    return rows;
}

std::string format_sweep(const std::vector<SweepRow>& rows) {
    std::ostringstream o;
    o << "# n frame label re im\n";
    for (const auto& r : rows)
        for (std::size_t k = 0; k < r.result.coords.size(); ++k)
            o << r.n << " " << r.result.frame.label() << " " << r.result.labels[k] << " "
              << r.result.coords[k].re.str() << " " << r.result.coords[k].im.str() << "\n";
    return o.str();
}

std::vector<BigComplex> fit_polynomial_in_n(const std::vector<long>& ns, const std::vector<BigComplex>& values,
                                            int degree) {
    if (degree < 0 || ns.size() != values.size() || ns.size() < std::size_t(degree) + 1)
        throw TooFewTerms("need degree+1 samples");
    std::size_t k = std::size_t(degree) + 1;
    std::vector<std::vector<BigComplex>> V(k, std::vector<BigComplex>(k)), rhs(k, std::vector<BigComplex>(1));
    for (std::size_t i = 0; i < k; ++i) {
        BigFloat p(1);
        for (std::size_t j = 0; j < k; ++j) {
            V[i][j] = BigComplex(p);
            p = p * BigFloat(ns[i]);
        }
        rhs[i][0] = values[i];
    }
    auto x = solve_linear(V, rhs);
    std::vector<BigComplex> a(k);
    for (std::size_t j = 0; j < k; ++j) a[j] = x[j][0];
    // remaining samples must sit on the polynomial
    for (std::size_t i = k; i < ns.size(); ++i) {
        BigComplex acc;
        BigFloat p(1);
        for (std::size_t j = 0; j < k; ++j) {
            acc = acc + a[j] * BigComplex(p);
            p = p * BigFloat(ns[i]);
        }
        BigComplex d = acc - values[i];
        double scale = std::max(magnitude(values[i]), 0.0);
        if (magnitude(d) > scale - 0.5 * double(working_digits())) throw ModelMismatch("samples are not polynomial in n");
    }
    return a;
}

// ---- elliptic ------------------------------------------------------------

std::vector<mpq_class> elliptic_k_coeffs(std::size_t count) {
    std::vector<mpq_class> a;
    mpq_class c = 1;
    for (std::size_t n = 0; n < count; ++n) {
        if (n) {
            mpq_class f(long(2 * n - 1), long(2 * n));
            f.canonicalize();
            c *= f * f;
        }
        a.push_back(c);
    }
    return a;
}

std::vector<mpq_class> elliptic_e_coeffs(std::size_t count) {
    auto a = elliptic_k_coeffs(count);
    for (std::size_t n = 0; n < count; ++n) {
        mpq_class d(1 - 2 * long(n));
        a[n] /= d;
    }
    return a;
}

namespace {

// (pi/2) sum a_n k^(2n) / (1-2n)^e
BigFloat elliptic_series(const BigFloat& k, bool e_kind) {
    BigFloat k2 = k * k;
    double lk2 = k2.log10_abs();
    if (!(lk2 < 0)) throw FrameOutOfRange("elliptic series needs |k| < 1");
    double target = -double(working_digits()) - 5;
    BigFloat sum, a(1), kp(1);
    double last = 0;
    for (long n = 0;; ++n) {
        if (n) {
            a = a * BigFloat(mpq_class(mpq_class(2 * n - 1, 2 * n) * mpq_class(2 * n - 1, 2 * n)));
            kp = kp * k2;
        }
        BigFloat t = a * kp;
        if (e_kind) t = t / BigFloat(1 - 2 * n);
        sum = sum + t;
        last = t.log10_abs();
        if (n > 4 && last < target) break;
        if (n > 20000000) throw NotComputable("elliptic series too slow");
    }
    // tail: terms decrease at least geometrically with ratio k^2
    double tail = last + lk2 - std::log10(1 - std::pow(10.0, lk2));
    return (sum * BigFloat::pi() / BigFloat(2)).widened(tail + 1);
}

}  // namespace

BigFloat elliptic_k(const BigFloat& k) { return elliptic_series(k, false); }
BigFloat elliptic_e(const BigFloat& k) { return elliptic_series(k, true); }

EllipticBranch elliptic_continue(long n, const mpq_class& w, unsigned digits) {
    if (n % 2 == 0) throw EvenWinding("winding number must be odd, got " + std::to_string(n));
    if (w <= mpq_class(1, 4)) throw FrameOutOfRange("continuation frame needs w > 1/4");
    PrecisionScope ps(digits + 20);
    EllipticBranch e;
    e.n = n;
    e.w = BigFloat(w);
    mpq_class uq = 1 / (4 * w);
    e.u = BigFloat(uq);
    e.uprime = sqrt(BigFloat(mpq_class(1 - uq * uq)));
    e.K_u = elliptic_k(e.u);
    e.K_up = elliptic_k(e.uprime);
    e.E_u = elliptic_e(e.u);
    e.E_up = elliptic_e(e.uprime);
    BigFloat nn(n);
    e.K_cont = BigComplex(e.u * e.K_u, e.u * nn * e.K_up);
    e.EK_cont = BigComplex((e.E_u - e.K_u) / e.u, -(nn * e.E_up) / e.u);
    std::size_t shown = 12;
    e.k_series = elliptic_k_coeffs(shown);
    e.e_series = elliptic_e_coeffs(shown);
    e.legendre_residual = e.E_u * e.K_up + e.E_up * e.K_u - e.K_u * e.K_up - BigFloat::pi() / BigFloat(2);
    return e;
}

BigComplex log_branch(const BigFloat& y, long n) {
    return BigComplex(log(abs(y) / BigFloat(4)), -(BigFloat::pi() * BigFloat(n)));
}

}  // namespace odeforge
