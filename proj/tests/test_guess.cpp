#include "doctest.h"

#include <sstream>

#include "odeforge/guess.hpp"
#include "odeforge/opalgebra.hpp"
#include "odeforge/textio.hpp"

using namespace odeforge;

namespace {

PrimeField F(32749);

PrimeSeries powers_of(u32 a, std::size_t n) {
    std::vector<u32> c(n);
    u32 x = 1;
    for (auto& v : c) {
        v = x;
        x = F.mul(x, a);
    }
    return PrimeSeries(F, c);
}

bool all_zero(const std::vector<u32>& v) {
    for (u32 x : v)
        if (x) return false;
    return true;
}

}  // namespace

TEST_CASE("budget counts unknowns") {
    CHECK(budget(24, 888) == 22225);
    CHECK(budget(32, 89, 5, 199) == 3970);
    CHECK(budget(29, 1237) == 37140);
    CHECK(budget(1, 1) == 4);
}

TEST_CASE("geometric series") {
    auto s = powers_of(2, 200);
    auto r = guess_ode(s, 1, 1);
    CHECK(r.op.order() == 1);
    CHECK(r.kernel_dim == 1);
    CHECK(all_zero(residual(r.op, s)));
    // proportional to (1-2w) theta - 2w, normalized at the first nonzero entry
    auto expect = lex_normalized(reduce(theta_from_rows({{0, -2}, {1, -2}}), F.p()));
    CHECK(r.op == expect);
}

TEST_CASE("constant series gives theta") {
    std::vector<u32> one(40, 0);
    one[0] = 1;
    PrimeSeries s(F, one);
    auto r = guess_ode(s, 2, 2);
    CHECK(r.op == reduce(theta_from_rows({{}, {1}}), F.p()));
}

TEST_CASE("w^2/(1-4w)^2 has an order-one annihilator") {
    std::vector<u32> c(120, 0);
    for (std::size_t n = 2; n < c.size(); ++n) c[n] = F.mul(F.from_int(long(n) - 1), F.pow(4, n - 2));
    PrimeSeries s(F, c);
    auto r = guess_ode(s, 2, 3);
    CHECK(r.op.order() == 1);
    CHECK(all_zero(residual(r.op, s)));
}

TEST_CASE("not enough terms") {
    CHECK_THROWS_AS(guess_ode(powers_of(3, 8), 4, 6), InsufficientTerms);
}

TEST_CASE("no annihilator within bounds") {
    // coefficients 1/n! have no order-1 degree-0 relation
    std::vector<u32> c(60);
    u32 fact = 1;
    for (std::size_t n = 0; n < c.size(); ++n) {
        if (n) fact = F.mul(fact, u32(n));
        c[n] = F.inv(fact);
    }
    CHECK_THROWS_AS(guess_ode(PrimeSeries(F, c), 1, 0), NoAnnihilatorFound);
}

TEST_CASE("extend series") {
    auto op = reduce(theta_from_rows({{0, -2}, {1, -2}}), F.p());
    auto s = extend_series(op, PrimeSeries(F, {1}), std::nullopt, 50);
    CHECK(s.coeffs == powers_of(2, 50).coeffs);

    auto th = reduce(theta_from_rows({{}, {1}}), F.p());
    auto k = extend_series(th, PrimeSeries(F, {1}), std::nullopt, 10);
    std::vector<u32> one(10, 0);
    one[0] = 1;
    CHECK(k.coeffs == one);

    // indicial factor (n)(n-7)(n+1) vanishes at n = 7; the forced value is
    // generically inconsistent
    ThetaOpQ L = theta_from_rows({{0, 1}, {-7, 1}, {-6, 1}, {1}});
    auto lp = reduce(L, F.p());
    CHECK_THROWS_AS(extend_series(lp, PrimeSeries(F, {1, 2, 3, 4, 5, 6}), std::nullopt, 20), IndicialObstruction);
    try {
        extend_series(lp, PrimeSeries(F, {1, 2, 3, 4, 5, 6}), std::nullopt, 20);
    } catch (const IndicialObstruction& e) {
        CHECK(e.index == 7);
    }
    CHECK_THROWS_AS(extend_series(lp, PrimeSeries(F, {}), std::nullopt, 20), SeedTooShort);
}

TEST_CASE("elliptic series and bases") {
    auto K = elliptic_k_series(F, 12);
    std::vector<u32> expect{1, 0, 4, 0, 36, 0, 400, 0, 4900, 0, 63504, 0};
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(K.coeffs[i] == expect[i] % F.p());

    auto b0 = elliptic_basis(F, 40, 0);
    auto b8 = elliptic_basis(F, 40, 8);
    REQUIRE(b0.bases.size() == 5);
    // (1-16w^2)^8 times the kappa=8 basis is the kappa=0 basis
    std::vector<u32> q(17, 0);
    // expand (1-16w^2)^8 with binomials
    long binom = 1;
    for (int k = 0; k <= 8; ++k) {
        q[2 * k] = F.mul(F.from_int(binom), F.pow(F.from_int(-16), k));
        binom = binom * (8 - k) / (k + 1);
    }
    for (int t = 0; t < 5; ++t) {
        auto back = series_mul(b8.bases[t].series, PrimeSeries(F, q));
        auto& ref = b0.bases[t].series;
        for (long n = 0; n < std::min(back.end(), ref.end()); ++n) CHECK(back.at(n) == ref.at(n));
    }
    // t = 1 is w (1-16w^2)^2 K^3 E / (1+4w)^6: check against direct products
    auto E = elliptic_e_series(F, 40);
    auto Kl = elliptic_k_series(F, 40);
    auto num = series_mul(series_mul(series_mul(Kl, Kl), Kl), E);
    PrimeSeries onem(F, {1, 0, F.from_int(-16)});
    num = series_mul(series_mul(num, onem), onem);
    PrimeSeries den(F, {1, 4});
    PrimeSeries d6 = den;
    for (int i = 1; i < 6; ++i) d6 = series_mul(d6, den);
    auto direct = series_mul(series_mul(num, series_recip(d6)), PrimeSeries(F, {0, 1}));
    for (long n = 0; n < std::min<long>(30, direct.end()); ++n) CHECK(direct.at(n) == b0.bases[1].series.at(n));
}

TEST_CASE("inhomogeneous fit") {
    // L y = Q_0 B_0 with L = theta + 1, planted Q_0 = 3 + w
    auto rhs = elliptic_basis(F, 120, 0, 1);
    RhsAnsatz one{{rhs.bases[0]}, 1};
    std::vector<u32> q(120, 0);
    q[0] = 3;
    q[1] = 1;
    auto e = series_mul(PrimeSeries(F, q), rhs.bases[0].series);
    auto L = reduce(theta_from_rows({{1}, {1}}), F.p());
    std::vector<u32> ecoef(120);
    for (long n = 0; n < 120; ++n) ecoef[std::size_t(n)] = n < e.end() ? e.at(n) : 0;
    PrimeSeries epad(F, ecoef);
    auto s = extend_series(L, PrimeSeries(F, {0}), epad, 110);
    auto r = guess_inhom(s, 1, 0, one);
    CHECK(r.op.order() == 1);
    REQUIRE(r.rhs_polys.size() == 1);
    // same ratio Q / op as planted
    u32 scale = r.op.coeff(1, 0).v;
    CHECK(r.rhs_polys[0].size() >= 2);
    CHECK(r.rhs_polys[0][0] == F.mul(3, scale));
    CHECK(r.rhs_polys[0][1] == F.mul(1, scale));

    // s in the span of the bases: operator part vanishes
    RhsAnsatz solo{{rhs.bases[2]}, 0};
    CHECK_THROWS_AS(guess_inhom(rhs.bases[2].series, 0, 0, solo), DegenerateFit);
}

TEST_CASE("operator text round trip") {
    ThetaOpQ L = theta_from_rows({{1, -2}, {0, 3}, {mpq_class(1).get_num().get_si(), 0, 4}});
    std::string t = write_op(L);
    CHECK(t.rfind("thetaop prime=exact order=2 degree=2\n", 0) == 0);
    std::istringstream in(t);
    auto back = read_op(in);
    CHECK(back.prime == 0);
    CHECK(back.op == L);
    auto lp = reduce(L, 101);
    std::istringstream in2(write_op(lp));
    auto b2 = read_op(in2);
    CHECK(b2.prime == 101);
    CHECK(to_prime_op(b2, 101) == lp);
}
