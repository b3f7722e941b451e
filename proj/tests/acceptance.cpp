// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "odeforge/continuation.hpp"
#include "odeforge/guess.hpp"
#include "odeforge/localfrob.hpp"
#include "odeforge/opalgebra.hpp"
#include "odeforge/pipeline.hpp"

using namespace odeforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

bool agree(const BigFloat& a, const BigFloat& b, double digits) {
    BigFloat d = a - b;
    return d.is_zero() || d.log10_abs() < -digits;
}

fs::path scratch_dir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("odeforge_accept_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

const ThetaOpQ gauss = theta_from_rows({{0, -1}, {0, -4}, {4, -4}});

// 1. unknown counts
Outcome budgets() {
    Outcome o;
    o.expect(budget(24, 888) == 22225, "order 24 degree 888");
    o.expect(budget(32, 89, 5, 199) == 3970, "inhomogeneous count");
    o.expect(budget(29, 1237) == 37140, "order 29 degree 1237");
    o.detail = o.ok ? "22225 3970 37140" : o.detail;
    return o;
}

// 2. matching point
Outcome match_point() {
    Outcome o;
    auto lin = optimize_match_point(8000, 800, 0.183, MatchMode::linear);
    auto sq = optimize_match_point(8000, 800, 0.183, MatchMode::sqrt);
    auto sig3 = [](double x, double ref) { return std::abs(x - ref) <= 0.5 * std::pow(10.0, std::floor(std::log10(ref)) - 2); };
    o.expect(sig3(lin.ym, 0.0577), "linear y_m");
    o.expect(std::abs(lin.digits - 400) <= 5, "linear digits");
    o.expect(sig3(sq.ym, 0.01535), "sqrt y_m");
    o.expect(std::abs(sq.digits - 860) <= 5, "sqrt digits");
    std::ostringstream s;
    s << "linear " << lin.ym << " / " << lin.digits << ", sqrt " << sq.ym << " / " << sq.digits;
    o.detail = o.ok ? s.str() : o.detail + " (" + s.str() + ")";
    return o;
}

// 3. symmetric decompositions
Outcome sym_verdicts() {
    Outcome o;
    o.expect(symmetric_power_order(2, 11) == 12, "sym power order");
    o.expect(symmetric_product_order_bounds(3, 4) == std::pair<long, long>(6, 12), "sym product bounds");
    std::vector<BlockScheme> target{{"0", {3, 3, 1, 1}}, {"1/4", {3, 1, 1, 1, 1}}, {"-1/4", {2, 2, 1, 0, 0, 0, 0}}};
    auto at = [](const SymVerdict& v, const std::string& pt) {
        for (const auto& p : v.points)
            if (p.point == pt) return p.not_ruled_out;
        return true;
    };
    auto pw = check_sym_decomposition(target, {2, 11}, SymMode::power);
    o.expect(!pw.not_ruled_out, "power 11 not ruled out");
    auto v34 = check_sym_decomposition(target, {3, 4}, SymMode::product);
    o.expect(!v34.not_ruled_out && !at(v34, "1/4"), "3x4 not ruled out at 1/4");
    auto v26 = check_sym_decomposition(target, {2, 6}, SymMode::product);
    o.expect(!v26.not_ruled_out && at(v26, "1/4") && !at(v26, "-1/4"), "2x6 verdict");
    return o;
}

// 4. random planted operators through the reconstruction pipeline
ThetaOpQ random_plantable(std::mt19937& rng, long terms) {
    std::uniform_int_distribution<int> coef(-20, 20), ord(1, 4), deg(1, 6);
    for (;;) {
        int M = ord(rng), D = deg(rng);
        std::vector<std::vector<long>> rows(std::size_t(M) + 1, std::vector<long>(std::size_t(D) + 1));
        for (auto& r : rows)
            for (auto& x : r) x = coef(rng);
        rows[0][0] = 0;  // exponent 0 at w = 0
        if (rows[std::size_t(M)][0] == 0) continue;
        // a zero theta^0 row makes theta a right factor and the solution constant
        if (std::all_of(rows[0].begin(), rows[0].end(), [](long x) { return x == 0; })) continue;
        bool nonzero_top = false;
        for (auto& r : rows) nonzero_top = nonzero_top || r[std::size_t(D)] != 0;
        if (!nonzero_top) continue;
        auto op = theta_from_rows(rows);
        // no other nonnegative integer exponent, so the analytic solution is unique
        auto P0 = [&](long n) {
            mpz_class v = 0, pw = 1;
            for (int i = 0; i <= M; ++i, pw *= n) v += rows[std::size_t(i)][0] * pw;
            return v;
        };
        bool clean = true;
        for (long n = 1; n < terms && clean; ++n) clean = P0(n) != 0;
        if (!clean) continue;
        // no common polynomial factor across the rows
        Poly<mpq_class> g;
        for (const auto& r : op.rows)
            if (!r.empty()) g = g.empty() ? r : poly::gcd(g, r);
        if (poly::deg(g) > 0) continue;
        return op;
    }
}

Outcome roundtrip(int count) {
    Outcome o;
    std::mt19937 rng(20240611);
    auto dir = scratch_dir("roundtrip");
    int recovered = 0, minimal_factor = 0, failures = 0;
    const long terms = 90;
    for (int t = 0; t < count; ++t) {
        auto op = random_plantable(rng, terms);
        write_file((dir / "plant.op").string(), write_op(op));
        std::string cfg_text = "[pipeline]\noutput_dir = \"run\"\njobs = 4\n[primes]\ncount = 12\n"
                               "[budget]\nmax_order = 4\nmax_degree = 6\n[planted]\noperator = \"plant.op\"\n"
                               "seed = [1]\nterms = " +
                               std::to_string(terms) + "\n";
        write_file((dir / "run.toml").string(), cfg_text);
        auto rep = run_reconstruction_pipeline(load_config((dir / "run.toml").string()));
        Manifest man = Manifest::parse(read_file((dir / "run/manifest.toml").string()));
        std::size_t planted_primes = 0;
        for (const auto& [name, h] : man.artifacts) planted_primes += name.rfind("primes/", 0) == 0;
        bool ok = rep.exit_code == 0 && rep.op && planted_primes >= 8;
        bool exact = ok && primitive(*rep.op) == primitive(op);
        // a reducible plant whose solution already satisfies a right factor:
        // the minimal operator is that factor, checked by exact division
        bool factor = ok && !exact && rep.op->order() < op.order() && right_divides(*rep.op, op);
        if (exact) {
            ++recovered;
        } else if (factor) {
            ++minimal_factor;
        } else {
            ++failures;
            if (failures <= 3) {
                std::string text = write_op(op);
                std::replace(text.begin(), text.end(), '\n', ' ');
                o.detail += (o.detail.empty() ? "" : "; ") + std::string("failed on ") + text;
            }
        }
    }
    fs::remove_all(dir);
    o.ok = failures == 0;
    o.detail = std::to_string(recovered) + "/" + std::to_string(count) + " recovered exactly" +
               (minimal_factor ? ", " + std::to_string(minimal_factor) + " reducible plants gave their minimal right factor" : "") +
               (o.detail.empty() ? "" : " (" + o.detail + ")");
    return o;
}

// 5. accidental roots
ThetaOpQ planted_l3() {
    Poly<mpq_class> h = parse_qpoly("1+3*w+4*w^2");
    DOp<mpq_class> d{{parse_qpoly("2"), parse_qpoly("w+w^2"),
                      poly::add(poly::scale(poly::shift_up(poly::deriv(h), 3), mpq_class(2)), poly::shift_up(h, 2)),
                      poly::shift_up(h, 3)},
                     mpq_class(1)};
    return primitive(from_dform(d));
}

Outcome accidental_roots() {
    Outcome o;
    Poly<mpq_class> h = parse_qpoly("1+3*w+4*w^2");
    ThetaOpQ l3 = planted_l3();
    ThetaOpQ prod = multiply(theta_from_rows({{2}, {1, 1}}), l3);

    auto r = split_roots(h, 32719);
    o.expect(std::set<u32>(r.begin(), r.end()) == std::set<u32>{8973, 31925}, "roots mod 32719");

    std::vector<ThetaOpP> mods;
    std::size_t split = 0;
    for (u32 p : default_primes(400, 1u << 15)) {
        if (mods.size() >= 11) break;
        if (split_roots(h, p).empty()) continue;
        ++split;
        try {
            mods.push_back(accidental_root_factor(reduce(prod, p), h).op);
        } catch (const Error&) {
        }
    }
    o.expect(mods.size() >= 8, "fewer than 8 splitting primes gave a factor");
    try {
        o.expect(primitive(lift_operator(mods, 3)) == l3, "lifted factor differs from the planted one");
    } catch (const Error& e) {
        o.expect(false, std::string("lift: ") + e.what());
    }

    // the factor pipeline finds it on its own
    auto dir = scratch_dir("acroot");
    write_file((dir / "prod.op").string(), write_op(prod));
    auto cfg = parse_config("[input]\noperator = \"prod.op\"\n[factor]\nmax_order = 3\nmax_degree = 8\n", dir.string());
    auto fr = probe_factors(read_op_file((dir / "prod.op").string()), cfg);
    bool found = false;
    for (const auto& f : fr.factors) found = found || (f.exact && primitive(*f.exact) == l3);
    o.expect(found, "factor pipeline missed L3");
    fs::remove_all(dir);
    if (o.ok) o.detail = std::to_string(mods.size()) + " splitting primes, roots {8973, 31925} mod 32719";
    return o;
}

// 6. p-curvature classes
Outcome curvature() {
    Outcome o;
    for (u32 p : {3u, 5u, 7u, 11u, 13u})
        o.expect(p_curvature(gauss, p).kind == Curvature::nilpotent, "gauss mod " + std::to_string(p));
    o.expect(p_curvature(theta_from_rows({{0, -1}, {1}}), 5).kind == Curvature::neither, "D-1 mod 5");
    for (u32 p : {3u, 5u, 7u})
        o.expect(p_curvature(theta_from_rows({{}, {1}}), p).kind == Curvature::zero, "theta mod " + std::to_string(p));
    return o;
}

// 7. rational limits
Outcome rational_limits() {
    Outcome o;
    // the sequence starts at n = 10; look for the shortest prefix that suffices
    std::vector<mpq_class> seq;
    mpq_class pw = 1;
    for (int n = 0; n <= 40; ++n) {
        if (n >= 10) seq.push_back(mpq_class(-637, 228) + pw);
        pw *= mpq_class(317, 500);
    }
    std::size_t used = 0;
    for (std::size_t k = 6; k <= 25 && !used; ++k) {
        try {
            auto d = detect_rational(std::vector<mpq_class>(seq.begin(), seq.begin() + long(k)));
            o.expect(d.value == mpq_class(-637, 228), "wrong limit " + d.value.get_str());
            used = k;
        } catch (const NoStableRational&) {
        }
    }
    o.expect(used > 0, "no detection within 25 terms");
    if (o.ok) o.detail = "-637/228 from the first " + std::to_string(used) + " terms";
    std::mt19937 rng(7);
    int rejected = 0;
    for (int t = 0; t < 20; ++t) {
        std::vector<mpq_class> noise;
        for (int i = 0; i < 25; ++i) noise.emplace_back(long(rng() % 2000001) - 1000000, long(rng() % 999983) + 1);
        try {
            detect_rational(noise);
        } catch (const NoStableRational&) {
            ++rejected;
        }
    }
    o.expect(rejected == 20, "noise accepted in " + std::to_string(20 - rejected) + " trials");
    return o;
}

// 8. elliptic branch against AGM values of K
BigFloat agm_K(const BigFloat& k) {
    BigFloat a(1), b = sqrt(BigFloat(1) - k * k);
    for (int i = 0; i < 200; ++i) {
        BigFloat an = (a + b) / BigFloat(2);
        b = sqrt(a * b);
        a = an;
        if (agree(a, b, working_digits() + 5)) break;
    }
    return BigFloat::pi() / (BigFloat(2) * a);
}

Outcome elliptic() {
    Outcome o;
    const unsigned digits = 60;
    auto e = elliptic_continue(1, mpq_class(3, 10), digits);
    PrecisionScope ps(100);
    BigFloat u(mpq_class(5, 6));
    BigFloat up = sqrt(BigFloat(1) - u * u);
    BigFloat re = u * agm_K(u), im = u * agm_K(up);
    o.expect(agree(e.K_cont.re, re, 50), "real part");
    o.expect(agree(e.K_cont.im, im, 50), "imaginary part");
    // an independent high-precision quadrature value of the same branch
    BigFloat ref_re = BigFloat::parse("1.722712442873892031625596701624810595204927381596312971797736553300906@70");
    o.expect(agree(e.K_cont.re, ref_re, 50), "reference value");
    double lres = e.legendre_residual.is_zero() ? -1e9 : e.legendre_residual.log10_abs();
    o.expect(lres < -(double(digits) - 5), "Legendre residual");
    if (o.ok) {
        std::ostringstream s;
        s << "agrees with AGM to " << std::min(-(e.K_cont.re - re).log10_abs(), -(e.K_cont.im - im).log10_abs())
          << " digits, Legendre residual 1e" << lres;
        o.detail = s.str();
    }
    return o;
}

// 9. amplitudes and winding sweeps
ThetaOpQ euler_cubed() {
    DOp<mpq_class> d;
    d.one = 1;
    Poly<mpq_class> u{mpq_class(-1, 2), 1};
    d.b = {Poly<mpq_class>{}, u, poly::scale(poly::mul(u, u), mpq_class(3)), poly::mul(u, poly::mul(u, u))};
    return from_dform(d);
}

Outcome amplitudes() {
    Outcome o;
    {
        PrecisionScope ps(80);
        std::vector<mpq_class> c(400);
        mpq_class b = 1, bg = 1;
        const mpq_class A(-17, 5);
        for (std::size_t n = 0; n < c.size(); ++n) {
            c[n] = A * b + bg;
            b = b * (mpq_class(7, 2) - long(n)) / long(n + 1) * -2;
            bg = bg * 3 / 5;
        }
        auto f = fit_amplitude(c, AmplitudeModel{mpq_class(7, 2), 0, BigFloat(mpq_class(1, 2)), 3});
        BigFloat rel = abs((f.amplitude - BigFloat(A)) / BigFloat(A));
        o.expect(rel.is_zero() || rel.log10_abs() < -10, "amplitude off by 1e" + std::to_string(rel.log10_abs()));
    }

    // theta_u^3 around u = 0: coordinate k picks up (2 pi i n)^(2-k) / (2-k)!
    auto op = euler_cubed();
    std::vector<BigComplex> start{BigComplex(), BigComplex(), BigComplex(BigFloat(4))};
    auto path = parse_path("1/2@2:n=1");
    std::vector<long> ns{-3, -1, 1, 3, 5};
    std::vector<BigFloat> c2, c1, c0;
    for (unsigned digits : {24u, 28u, 32u, 36u, 40u, 44u}) {
        auto rows = winding_sweep(op, Frame{0, 1, 1}, start, path, 0, ns, digits);
        PrecisionScope ps(digits);
        std::vector<BigComplex> v0, v1;
        for (const auto& r : rows) {
            v0.push_back(r.result.coords[0]);
            v1.push_back(r.result.coords[1]);
        }
        auto f0 = fit_polynomial_in_n(ns, v0, 2);
        auto f1 = fit_polynomial_in_n(ns, v1, 2);
        BigFloat pi = BigFloat::pi();
        c2.push_back(-f0[2].re / (pi * pi));  // n^2 coefficient over (i pi)^2
        c0.push_back(f0[0].re);
        c1.push_back(f1[1].im / pi);  // n coefficient over i pi
    }
    try {
        auto r2 = detect_rational(c2, 3), r1 = detect_rational(c1, 3), r0 = detect_rational(c0, 3);
        o.expect(r2.value == 1 && r1.value == 2 && r0.value == 0,
                 "fit gave " + r2.value.get_str() + ", " + r1.value.get_str() + ", " + r0.value.get_str());
    } catch (const Error& e) {
        o.expect(false, std::string("sweep fit: ") + e.what());
    }
    if (o.ok) o.detail = "A = -17/5 to 1e-10; sweep fits -(i pi)^2 n^2 and 2 (i pi) n exactly";
    return o;
}

// 10. randomized suites, run as their own executable
Outcome properties(const std::string& bin) {
    Outcome o;
    if (bin.empty() || !fs::exists(bin)) {
        o.expect(false, "property suite binary not found: " + bin);
        return o;
    }
    int st = std::system((bin + " --minimal >/dev/null 2>&1").c_str());
    o.expect(WIFEXITED(st) && WEXITSTATUS(st) == 0, "property suites failed");
    if (o.ok) o.detail = "all suites green with 1000 cases each";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::string props = argc > 1 ? argv[1] : "";
    int roundtrip_count = argc > 2 ? std::atoi(argv[2]) : 100;
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"budget counts", budgets},
        {"optimal matching point", match_point},
        {"symmetric decomposition verdicts", sym_verdicts},
        {"guess/extend/lift roundtrip", [&] { return roundtrip(roundtrip_count); }},
        {"accidental root factor", accidental_roots},
        {"p-curvature classes", curvature},
        {"rational limit detection", rational_limits},
        {"elliptic continuation", elliptic},
        {"amplitude and winding fits", amplitudes},
        {"randomized invariant suites", [&] { return properties(props); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.ok) ++failed;
        std::printf("criterion %2zu %s: %s [%.2fs] %s\n", i + 1, o.ok ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
