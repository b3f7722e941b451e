#include "doctest.h"

#include <random>

#include "odeforge/guess.hpp"
#include "odeforge/opalgebra.hpp"

using namespace odeforge;

namespace {

ThetaOpQ random_op(std::mt19937& rng, int M, int D) {
    std::uniform_int_distribution<int> c(-9, 9);
    std::vector<std::vector<long>> rows(std::size_t(M) + 1, std::vector<long>(std::size_t(D) + 1));
    for (auto& r : rows)
        for (auto& x : r) x = c(rng);
    if (rows[M][0] == 0) rows[M][0] = 1;
    return theta_from_rows(rows);
}

std::vector<mpq_class> random_series(std::mt19937& rng, std::size_t n) {
    std::uniform_int_distribution<int> c(-50, 50);
    std::vector<mpq_class> s(n);
    for (auto& x : s) x = c(rng);
    return s;
}

const ThetaOpQ gauss = theta_from_rows({{0, -1}, {0, -4}, {4, -4}});

}  // namespace

TEST_CASE("apply") {
    auto th = theta_from_rows({{}, {1}});
    std::vector<mpq_class> s{3, 5, 7, 11};
    auto t = odeforge::apply(th, s);
    CHECK(t == std::vector<mpq_class>{0, 5, 14, 33});

    std::vector<mpq_class> g(30);
    for (std::size_t n = 0; n < g.size(); ++n) g[n] = mpq_class(mpz_class(1) << n);
    for (const auto& v : odeforge::apply(theta_from_rows({{0, -2}, {1, -2}}), g)) CHECK(v == 0);

    CHECK_THROWS_AS(odeforge::apply(theta_from_rows({{0, 0, 1}, {1}}), {1, 2}), SeriesTooShort);
}

TEST_CASE("multiply") {
    auto th = theta_from_rows({{}, {1}});
    auto w = theta_from_rows({{0, 1}});
    CHECK(multiply(th, w) == theta_from_rows({{0, 1}, {0, 1}}));
    CHECK(multiply(theta_from_rows({{-1}, {1}}), theta_from_rows({{-2}, {1}})) == theta_from_rows({{2}, {-3}, {1}}));

    std::mt19937 rng(1);
    for (int t = 0; t < 20; ++t) {
        auto a = random_op(rng, 2, 2), b = random_op(rng, 2, 3);
        auto f = random_series(rng, 30);
        CHECK(odeforge::apply(multiply(a, b), f) == odeforge::apply(a, odeforge::apply(b, f)));
    }
}

TEST_CASE("right division") {
    auto d = right_divide(theta_from_rows({{2}, {-3}, {1}}), theta_from_rows({{-2}, {1}}));
    CHECK(d.remainder.is_zero());
    CHECK(right_divides(theta_from_rows({{-1}, {1}}), theta_from_rows({{2}, {-3}, {1}})));
    CHECK_FALSE(right_divides(theta_from_rows({{-1}, {1}}), theta_from_rows({{}, {}, {1}})));

    std::mt19937 rng(2);
    for (int t = 0; t < 50; ++t) {
        auto a = random_op(rng, 1 + t % 2, 2), b = random_op(rng, 1 + t % 3, 2);
        auto l = multiply(a, b);
        auto r = right_divide(l, b);
        CHECK(r.remainder.is_zero());
        // multiplier * l == quotient * b
        std::vector<Poly<mpq_class>> rows;
        for (const auto& row : l.rows) rows.push_back(poly::mul(r.multiplier, row));
        CHECK(ThetaOpQ(rows, mpq_class(1)) == multiply(r.quotient, b));
    }
}

TEST_CASE("adjoint") {
    CHECK(adjoint(theta_from_rows({{}, {1}})) == theta_from_rows({{-1}, {-1}}));
    std::mt19937 rng(3);
    for (int t = 0; t < 20; ++t) {
        auto a = random_op(rng, 3, 3), b = random_op(rng, 2, 2);
        CHECK(adjoint(adjoint(a)) == a);
        CHECK(adjoint(multiply(a, b)) == multiply(adjoint(b), adjoint(a)));
    }
}

TEST_CASE("annihilators of rational functions") {
    // content normalization makes the first coefficient positive: 2 - theta
    CHECK(annihilator_of_rational(parse_qpoly("w^2"), parse_qpoly("1")) == primitive(theta_from_rows({{-2}, {1}})));
    CHECK(primitive(theta_from_rows({{-2}, {1}})) == theta_from_rows({{2}, {-1}}));

    auto L = annihilator_of_rational(parse_qpoly("w^2"), parse_qpoly("1-8*w+16*w^2"));
    CHECK(L.order() == 1);
    std::vector<mpq_class> f(100, 0);
    for (std::size_t n = 2; n < f.size(); ++n) f[n] = mpq_class(mpz_class(n - 1) * (mpz_class(1) << (2 * (n - 2))));
    for (const auto& v : odeforge::apply(L, f)) CHECK(v == 0);

    auto P = parse_qpoly(
        "9+36*w+18*w^2-2064*w^3+4581*w^4+59584*w^5-143476*w^6-898464*w^7+124724*w^8+813120*w^9"
        "+9220240*w^10+55704896*w^11+65556224*w^12-253883392*w^13-406194176*w^14+1318182912*w^15"
        "+2053013504*w^16+368443392*w^17-454033408*w^18-272629760*w^19");
    auto got = annihilator_of_rational(poly::mul(P, parse_qpoly("w^2")), parse_qpoly("1-4*w"));
    // [w(1-4w)P] d/dw - [(2-4w)P + w(1-4w)P'] in theta form
    auto one_m = parse_qpoly("1-4*w");
    Poly<mpq_class> r1 = poly::mul(one_m, P);
    Poly<mpq_class> r0 = poly::add(poly::mul(parse_qpoly("2-4*w"), P), poly::mul(parse_qpoly("w-4*w^2"), poly::deriv(P)));
    r0 = poly::scale(r0, mpq_class(-1));
    CHECK(got == primitive(ThetaOpQ({r0, r1}, mpq_class(1))));

    CHECK_THROWS_AS(annihilator_of_rational(Poly<mpq_class>{}, parse_qpoly("1")), ZeroFunction);
}

TEST_CASE("p-curvature") {
    for (u32 p : {3u, 5u, 7u, 11u, 13u}) CHECK(p_curvature(gauss, p).kind == Curvature::nilpotent);
    // D - 1 is theta - w after clearing the w
    auto dm1 = theta_from_rows({{0, -1}, {1}});
    CHECK(p_curvature(dm1, 5).kind == Curvature::neither);
    for (u32 p : {3u, 5u, 7u}) CHECK(p_curvature(theta_from_rows({{}, {1}}), p).kind == Curvature::zero);
    CHECK_THROWS_AS(p_curvature(theta_from_rows({{1}, {3}}), 3), BadReduction);
    // products of nilpotent factors stay nilpotent
    auto prod = multiply(theta_from_rows({{0, -1}, {1, -1}}), gauss);
    for (u32 p : {5u, 7u}) CHECK(p_curvature(prod, p).kind != Curvature::neither);
}

TEST_CASE("symmetric order bookkeeping") {
    CHECK(symmetric_power_order(2, 11) == 12);
    CHECK(symmetric_power_order(5, 1) == 5);
    CHECK(symmetric_power_order(3, 2) == 6);
    CHECK(symmetric_product_order_bounds(3, 4) == std::pair<long, long>(6, 12));
    CHECK(symmetric_product_order_bounds(1, 7) == std::pair<long, long>(7, 7));
    CHECK(symmetric_product_order_bounds(2, 6) == std::pair<long, long>(7, 12));
}

TEST_CASE("block products") {
    CHECK(block_product_scheme({"0", {2}}, {"0", {1}}) == BlockScheme("0", {3, 1}));
    CHECK(block_product_scheme({"0", {0}}, {"0", {4}}) == BlockScheme("0", {4}));
    CHECK(block_product_scheme({"0", {1}}, {"0", {1}}) == BlockScheme("0", {2, 0}));
    CHECK_THROWS_AS(block_product_scheme({"0", {1}}, {"1/4", {1}}), PointMismatch);
    auto big = block_product_scheme({"0", {2, 1, 0}}, {"0", {3, 1}});
    CHECK(big.solutions() == 6 * 6);
}

TEST_CASE("symmetric decomposition verdicts on the order-12 schemes") {
    std::vector<BlockScheme> target{{"0", {3, 3, 1, 1}}, {"1/4", {3, 1, 1, 1, 1}}, {"-1/4", {2, 2, 1, 0, 0, 0, 0}}};
    auto v34 = check_sym_decomposition(target, {3, 4}, SymMode::product);
    CHECK_FALSE(v34.not_ruled_out);
    for (const auto& pv : v34.points)
        if (pv.point == "1/4") CHECK_FALSE(pv.not_ruled_out);

    auto v26 = check_sym_decomposition(target, {2, 6}, SymMode::product);
    CHECK_FALSE(v26.not_ruled_out);
    for (const auto& pv : v26.points) {
        if (pv.point == "1/4") CHECK(pv.not_ruled_out);
        if (pv.point == "-1/4") CHECK_FALSE(pv.not_ruled_out);
    }

    auto pw = check_sym_decomposition(target, {2, 11}, SymMode::power);
    CHECK_FALSE(pw.not_ruled_out);
}

TEST_CASE("d-form display") {
    CHECK(format_dform(theta_from_rows({{0, -1}, {1}})).find("D") != std::string::npos);
}
