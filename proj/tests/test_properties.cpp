#include "doctest.h"

#include <random>

#include "odeforge/continuation.hpp"
#include "odeforge/localfrob.hpp"
#include "odeforge/opalgebra.hpp"
#include "odeforge/reconstruct.hpp"

using namespace odeforge;

namespace {

constexpr int kCases = 1000;

ThetaOpQ random_op(std::mt19937& rng, int M, int D, int range = 5) {
    std::uniform_int_distribution<int> c(-range, range);
    std::vector<std::vector<long>> rows(std::size_t(M) + 1, std::vector<long>(std::size_t(D) + 1));
    for (auto& r : rows)
        for (auto& x : r) x = c(rng);
    if (rows[std::size_t(M)][0] == 0) rows[std::size_t(M)][0] = 1;
    return theta_from_rows(rows);
}

int pick(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// every truncation-safe order of the residual vanishes
template <class T>
bool vanishes(const ThetaOp<T>& local, const LogSolutionT<T>& s, int degree) {
    auto r = log_residual(local, s);
    for (const auto& lvl : r)
        for (std::size_t n = 0; n + std::size_t(degree) + 2 < lvl.size(); ++n)
            if (!poly::is_zero(lvl[n])) return false;
    return true;
}

// |a - b| within the combined tag
bool within_tag(const BigFloat& a, const BigFloat& b) {
    BigFloat d = a - b;
    return d.is_zero() || d.log10_abs() <= d.log10_error();
}

}  // namespace

TEST_CASE("operator algebra laws") {
    std::mt19937 rng(101);
    for (int t = 0; t < kCases; ++t) {
        auto a = random_op(rng, pick(rng, 0, 2), pick(rng, 0, 2));
        auto b = random_op(rng, pick(rng, 0, 2), pick(rng, 0, 2));
        auto c = random_op(rng, pick(rng, 0, 2), pick(rng, 0, 2));
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
        CHECK(adjoint(adjoint(a)) == a);
        CHECK(adjoint(multiply(a, b)) == multiply(adjoint(b), adjoint(a)));
    }
}

TEST_CASE("right division of products") {
    std::mt19937 rng(202);
    for (int t = 0; t < kCases; ++t) {
        auto a = random_op(rng, pick(rng, 0, 2), pick(rng, 0, 2));
        auto b = random_op(rng, pick(rng, 1, 2), pick(rng, 0, 2));
        auto l = multiply(a, b);
        auto r = right_divide(l, b);
        CHECK(r.remainder.is_zero());
        std::vector<Poly<mpq_class>> rows;
        for (const auto& row : l.rows) rows.push_back(poly::mul(r.multiplier, row));
        CHECK(ThetaOpQ(rows, mpq_class(1)) == multiply(r.quotient, b));
        CHECK(right_divides(b, l));
    }
}

TEST_CASE("frobenius solutions are annihilated") {
    std::mt19937 rng(303);
    const u32 p = 32749;
    int solved = 0;
    for (int t = 0; t < kCases; ++t) {
        int M = pick(rng, 1, 3), D = pick(rng, 1, 2);
        auto rows = std::vector<std::vector<long>>(std::size_t(M) + 1, std::vector<long>(std::size_t(D) + 1));
        for (auto& r : rows)
            for (auto& x : r) x = pick(rng, -6, 6);
        rows[std::size_t(M)][0] = pick(rng, 1, 4);
        // repeated exponents at 0 exercise the log solutions
        if (t % 3 == 0)
            for (int i = 0; i < M; ++i) rows[std::size_t(i)][0] = 0;
        auto op = theta_from_rows(rows);
        auto opp = reduce(op, p);
        try {
            auto basis = frobenius_solve(opp, LocalFrame{}, 16, 4);
            auto loc = local_operator(opp, LocalFrame{});
            for (const auto& s : basis.solutions) CHECK(vanishes(loc, s, D));
            ++solved;
        } catch (const Error&) {
        }
        if (t % 51 == 0) {
            auto basis = frobenius_solve(op, LocalFrame{}, 12, 4);
            auto loc = local_operator(op, LocalFrame{});
            for (const auto& s : basis.solutions) CHECK(vanishes(loc, s, D));
        }
    }
    CHECK(solved >= kCases / 2);
}

TEST_CASE("rational lifts are stable once correct") {
    std::mt19937 rng(404);
    auto primes = default_primes(10);
    std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 1000000);
    for (int t = 0; t < kCases; ++t) {
        mpq_class x(num(rng), den(rng));
        x.canonicalize();
        auto rs = residues_of(x, primes);
        bool correct = false;
        for (std::size_t k = 1; k <= rs.size(); ++k) {
            ResidueSet part(rs.begin(), rs.begin() + long(k));
            std::optional<mpq_class> y;
            try {
                y = rational_lift(part);
            } catch (const Error&) {
            }
            if (correct) CHECK(y == x);
            correct = correct || y == x;
        }
        CHECK(correct);
        CHECK(crt_lift(rs) % crt_modulus(rs) == (crt_lift(rs) % crt_modulus(rs)));
    }
}

TEST_CASE("crt reproduces integers") {
    std::mt19937 rng(505);
    auto primes = default_primes(6);
    for (int t = 0; t < kCases; ++t) {
        mpz_class x = (mpz_class(long(rng())) << 40) + long(rng());
        if (rng() % 2) x = -x;
        CHECK(crt_lift(residues_of(mpq_class(x), primes)) == x);
    }
}

TEST_CASE("nullspace vectors") {
    std::mt19937 rng(606);
    PrimeField f(101);
    for (int t = 0; t < kCases; ++t) {
        std::size_t r = std::size_t(pick(rng, 1, 6)), c = std::size_t(pick(rng, 1, 7));
        FpMatrix m(r, c);
        for (auto& e : m.entries) e = u32(pick(rng, 0, 3) == 0 ? 0 : pick(rng, 0, 100));
        auto ns = nullspace(m, f);
        CHECK(ns.size() == c - rank(m, f));
        for (const auto& v : ns) {
            auto mv = mat_vec(m, v, f);
            CHECK(std::all_of(mv.begin(), mv.end(), [](u32 x) { return x == 0; }));
        }
    }
}

TEST_CASE("series reciprocals") {
    std::mt19937 rng(707);
    PrimeField f(32749);
    for (int t = 0; t < kCases; ++t) {
        std::vector<u32> c(std::size_t(pick(rng, 1, 24)));
        for (auto& x : c) x = u32(pick(rng, 0, 32748));
        if (c[0] == 0) c[0] = 1;
        PrimeSeries a(f, c);
        auto prod = series_mul(a, series_recip(a));
        REQUIRE(prod.size() == c.size());
        CHECK(prod.at(0) == 1);
        for (long n = 1; n < prod.end(); ++n) CHECK(prod.at(n) == 0);
    }
}

TEST_CASE("precision tags bound rerun differences") {
    std::mt19937 rng(808);
    std::uniform_int_distribution<long> num(1, 999);
    for (int t = 0; t < kCases; ++t) {
        mpq_class x(num(rng), 1000);
        x.canonicalize();
        auto eval = [&](unsigned digits) {
            PrecisionScope ps(digits);
            BigFloat v(x);
            return exp(sqrt(v) + log(v + BigFloat(3))) / (BigFloat::pi() * cos(v)) - pow(v, 5);
        };
        BigFloat lo = eval(30), hi = eval(80);
        PrecisionScope ps(90);
        CHECK(within_tag(lo, hi));
        CHECK(lo.digits() >= 25);
    }

    // local solutions of the Gauss operator evaluated at two precisions
    Frame f{0, 1, 1};
    auto basis = local_basis(theta_from_rows({{0, -1}, {0, -4}, {4, -4}}), f, 80);
    for (int t = 0; t < kCases; ++t) {
        mpq_class w(num(rng), 20000);
        w.canonicalize();
        std::vector<std::vector<BigFloat>> lo, hi;
        {
            PrecisionScope ps(30);
            lo = basis_jets(basis, BigFloat(w), 2);
        }
        {
            PrecisionScope ps(80);
            hi = basis_jets(basis, BigFloat(w), 2);
        }
        PrecisionScope ps(90);
        for (std::size_t i = 0; i < lo.size(); ++i)
            for (std::size_t j = 0; j < lo[i].size(); ++j) CHECK(within_tag(lo[i][j], hi[i][j]));
    }
}
