#include "odeforge/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace odeforge {

ResidueSet residues_of(const mpq_class& x, const std::vector<u32>& primes) {
    ResidueSet rs;
    for (u32 p : primes) rs.push_back({p, PrimeField(p, PrimeField::word_limit).from_mpq(x)});
    return rs;
}

static void check_distinct(const ResidueSet& rs) {
    std::set<u32> seen;
    for (const auto& r : rs) {
        if (!seen.insert(r.prime).second) throw FieldMismatch("repeated prime " + std::to_string(r.prime));
        if (r.value >= r.prime) throw FieldMismatch("residue out of range");
    }
}

mpz_class crt_modulus(const ResidueSet& rs) {
    mpz_class m = 1;
    for (const auto& r : rs) m *= r.prime;
    return m;
}

mpz_class crt_lift(const ResidueSet& rs) {
    if (rs.empty()) throw FieldMismatch("no residues");
    check_distinct(rs);
    mpz_class x = rs[0].value, m = rs[0].prime;
    for (std::size_t k = 1; k < rs.size(); ++k) {
        PrimeField F(rs[k].prime, PrimeField::word_limit);
        // x + m t = r mod p
        u32 xm = F.from_mpz(x), mm = F.from_mpz(m);
        u32 t = F.mul(F.sub(rs[k].value, xm), F.inv(mm));
        x += m * t;
        m *= rs[k].prime;
    }
    if (2 * x > m) x -= m;
    return x;
}

static mpz_class symmetric(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    if (2 * r > m) r -= m;
    return r;
}

bool stable_under_drop(const mpz_class& x, const ResidueSet& rs, int drop) {
    if (int(rs.size()) <= drop) return x == 0;
    // a lift over a subset equals x exactly when |x| is inside the subset's
    // symmetric range; the weakest subset drops the largest primes
    std::vector<u32> ps;
    for (const auto& r : rs) ps.push_back(r.prime);
    std::sort(ps.begin(), ps.end());
    mpz_class sub = 1;
    for (std::size_t i = 0; i + drop < ps.size(); ++i) sub *= ps[i];
    return 2 * abs(x) < sub;
}

Pow2Lift strip_pow2_lift(const ResidueSet& rs, long k_max, int drop) {
    check_distinct(rs);
    for (const auto& r : rs)
        if (r.prime % 2 == 0) throw FieldMismatch("even modulus");
    mpz_class P = crt_modulus(rs);
    mpz_class x = crt_lift(rs);
    if (x == 0) return {0, 0};
    mpz_class half = (P + 1) / 2;  // inverse of 2 mod P
    // stable k form an interval ending at the true exponent; beyond it the
    // lift is a fraction and blows up
    long best = -1;
    mpz_class best_m;
    for (long k = 0; k <= k_max; ++k) {
        if (stable_under_drop(x, rs, drop)) {
            best = k;
            best_m = x;
        } else if (best >= 0) {
            break;
        }
        x = symmetric(x * half, P);
    }
    if (best < 0) throw NoConsistentK("no k in [0, " + std::to_string(k_max) + "] gives a stable lift");
    return {best, best_m};
}

mpq_class rational_lift(const ResidueSet& rs) {
    mpz_class m = crt_modulus(rs);
    mpz_class a = crt_lift(rs);
    if (a < 0) a += m;
    // bound: |n|, d <= sqrt(m/2)
    mpz_class bound;
    mpz_class half_m = m / 2;
    mpz_sqrt(bound.get_mpz_t(), half_m.get_mpz_t());
    mpz_class r0 = m, r1 = a, t0 = 0, t1 = 1;
    while (r1 > bound) {
        mpz_class q = r0 / r1;
        mpz_class r2 = r0 - q * r1, t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    if (t1 == 0 || abs(t1) > bound) throw NoRationalFound();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), t1.get_mpz_t(), m.get_mpz_t());
    if (g != 1) throw NoRationalFound("denominator shares a factor with the modulus");
    mpq_class q(r1, t1);
    q.canonicalize();
    for (const auto& r : rs)
        if (PrimeField(r.prime, PrimeField::word_limit).from_mpq(q) != r.value)
            throw NoRationalFound("candidate fails residue check");
    return q;
}

mpz_class guess_normalizer(const std::vector<mpq_class>& coeffs) {
    mpz_class l = 1;
    for (const auto& c : coeffs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    return l;
}

static double ln_abs(const mpz_class& z) {
    if (z == 0) return 0;
    long e;
    double d = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(std::fabs(d)) + double(e) * std::log(2.0);
}

double digits_measure(const mpq_class& c) {
    return (ln_abs(c.get_num()) + ln_abs(c.get_den())) / std::log(30000.0);
}

BudgetFit fit_prime_budget(const std::vector<std::pair<double, double>>& samples, long horizon, long headroom) {
    std::set<double> distinct;
    for (auto& s : samples) distinct.insert(s.first);
    if (distinct.size() < 3) throw InsufficientSamples("need samples at 3 distinct indices");
    // normal equations in long double, n rescaled to [0, 1]
    long double scale = std::max<long double>(1, horizon);
    long double S[5] = {0, 0, 0, 0, 0}, T[3] = {0, 0, 0};
    for (auto& [n, r] : samples) {
        long double x = n / scale, p = 1;
        for (int k = 0; k < 5; ++k) {
            S[k] += p;
            if (k < 3) T[k] += p * r;
            p *= x;
        }
    }
    long double A[3][4] = {{S[0], S[1], S[2], T[0]}, {S[1], S[2], S[3], T[1]}, {S[2], S[3], S[4], T[2]}};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            long double f = A[r][c] / A[c][c];
            for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
        }
    }
    long double b0 = A[0][3] / A[0][0], b1 = A[1][3] / A[1][1], b2 = A[2][3] / A[2][2];
    BudgetFit fit;
    fit.samples = samples;
    fit.c0 = double(b0);
    fit.c1 = double(b1 / scale);
    fit.c2 = double(b2 / (scale * scale));
    auto eval = [&](long double n) { return b0 + b1 * (n / scale) + b2 * (n / scale) * (n / scale); };
    long double best_n = 0, best = eval(0);
    if (eval(horizon) > best) { best = eval(horizon); best_n = horizon; }
    if (b2 < 0) {
        long double v = -b1 / (2 * b2) * scale;
        if (v > 0 && v < horizon && eval(v) > best) { best = eval(v); best_n = v; }
    }
    fit.fitted_max = double(best);
    fit.argmax = double(best_n);
    double observed = 0;
    for (auto& s : samples) observed = std::max(observed, s.second);
    double top = std::max<double>(double(best), observed);
    fit.predicted_max_primes = long(std::ceil(top - 1e-9)) + headroom;
    return fit;
}

BudgetFit estimate_prime_budget(const std::vector<std::pair<long, mpq_class>>& partial, long horizon, long headroom) {
    std::vector<std::pair<double, double>> samples;
    for (auto& [n, c] : partial) samples.push_back({double(n), digits_measure(c)});
    return fit_prime_budget(samples, horizon, headroom);
}

std::string budget_svg(const BudgetFit& fit, long horizon) {
    const double W = 640, H = 400, pad = 40;
    double ymax = std::max(1.0, fit.fitted_max);
    for (auto& s : fit.samples) ymax = std::max(ymax, s.second);
    ymax *= 1.1;
    auto X = [&](double n) { return pad + (W - 2 * pad) * n / std::max<long>(1, horizon); };
    auto Y = [&](double r) { return H - pad - (H - 2 * pad) * r / ymax; };
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
        << "\" stroke=\"black\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
    for (int k = 0; k <= 200; ++k) {
        double n = double(horizon) * k / 200.0;
        out << X(n) << "," << Y(fit.c0 + fit.c1 * n + fit.c2 * n * n) << " ";
    }
    out << "\"/>\n";
    for (auto& s : fit.samples)
        out << "<circle cx=\"" << X(s.first) << "\" cy=\"" << Y(s.second) << "\" r=\"3\" fill=\"crimson\"/>\n";
    out << "<text x=\"" << pad << "\" y=\"" << pad - 10 << "\" font-size=\"12\">r_n = ln|c_n|/ln 30000, predicted "
        << fit.predicted_max_primes << " primes</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace odeforge
