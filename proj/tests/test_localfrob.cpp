#include "doctest.h"

#include <sstream>

#include "odeforge/localfrob.hpp"
#include "odeforge/reconstruct.hpp"

using namespace odeforge;

namespace {

const ThetaOpQ theta2 = theta_from_rows({{}, {}, {1}});
const ThetaOpQ theta3 = theta_from_rows({{}, {}, {}, {1}});
const ThetaOpQ gauss = theta_from_rows({{0, -1}, {0, -4}, {4, -4}});
// 8 theta^3 - w (2 theta + 1)^3
const ThetaOpQ clausen = theta_from_rows({{0, -1}, {0, -6}, {0, -12}, {8, -8}});
const Poly<mpq_class> h = parse_qpoly("1+3*w+4*w^2");

// order three with head w^3 h(w) in d/dw form
ThetaOpQ planted_l3() {
    DOp<mpq_class> d{{parse_qpoly("2"), parse_qpoly("w+w^2"),
                      poly::add(poly::scale(poly::shift_up(poly::deriv(h), 3), mpq_class(2)), poly::shift_up(h, 2)),
                      poly::shift_up(h, 3)},
                     mpq_class(1)};
    return primitive(from_dform(d));
}

template <class T>
bool vanishes(const ThetaOp<T>& op, const LocalFrame& f, const LogSolutionT<T>& s) {
    auto loc = local_operator(op, f);
    auto r = log_residual(loc, s);
    // the last few orders see the truncation
    for (const auto& lvl : r)
        for (std::size_t n = 0; n + std::size_t(op.degree()) + 2 < lvl.size(); ++n)
            if (!poly::is_zero(lvl[n])) return false;
    return true;
}

}  // namespace

TEST_CASE("indicial equations") {
    auto i0 = indicial(theta2, parse_frame("0"));
    CHECK(i0.exponents == std::vector<std::pair<mpq_class, int>>{{0, 2}});

    auto pole = indicial(theta_from_rows({{0, -2}, {1, -2}}), parse_frame("1/2"));
    REQUIRE(pole.exponents.size() == 1);
    CHECK(pole.exponents[0].first == -1);

    // (1-4w) theta - 7w annihilates (1-4w)^(-7/4)
    auto e74 = indicial(theta_from_rows({{0, -7}, {1, -4}}), parse_frame("1/4"));
    REQUIRE(e74.exponents.size() == 1);
    CHECK(e74.exponents[0].first == mpq_class(-7, 4));

    auto ord = indicial(gauss, parse_frame("1/3"));
    CHECK(ord.ordinary);

    CHECK_THROWS_AS(indicial(planted_l3(), parse_frame("root:1+3*w+4*w^2")), NotComputable);
    auto irr = indicial(theta_from_rows({{-2}, {}, {1}}), parse_frame("0"));
    CHECK(poly::deg(irr.unresolved) == 2);
}

TEST_CASE("frobenius blocks") {
    auto b2 = frobenius_solve(theta2, parse_frame("0"), 10);
    REQUIRE(b2.solutions.size() == 2);
    CHECK(scheme_of(b2, "0") == BlockScheme("0", {1}));

    auto b3 = frobenius_solve(theta3, parse_frame("0"), 10);
    CHECK(b3.solutions.size() == 3);
    CHECK(scheme_of(b3, "0") == BlockScheme("0", {2}));

    auto g = frobenius_solve(gauss, parse_frame("0"), 30);
    REQUIRE(g.solutions.size() == 2);
    // 2F1(1/2,1/2;1;w) = sum (binom(2n,n)/4^n)^2 w^n
    const auto& s0 = g.solutions[0].parts[0];
    CHECK(s0[1] == mpq_class(1, 4));
    CHECK(s0[2] == mpq_class(9, 64));
    CHECK(s0[3] == mpq_class(25, 256));
    for (const auto& s : g.solutions) CHECK(vanishes(gauss, parse_frame("0"), s));

    auto gi = frobenius_solve(gauss, parse_frame("inf"), 20);
    CHECK(gi.solutions.size() == 2);
    for (const auto& s : gi.solutions) CHECK(vanishes(gauss, parse_frame("inf"), s));

    CHECK_THROWS_AS(frobenius_solve(theta_from_rows({{}, {}, {}, {}, {}, {1}}), parse_frame("0"), 10, 2),
                    DepthBudgetExceeded);
}

TEST_CASE("factor solutions appear in the product basis") {
    auto a = theta_from_rows({{2}, {1, 1}});
    auto l = multiply(a, gauss);
    auto basis = frobenius_solve(l, parse_frame("0"), 25);
    CHECK(basis.solutions.size() == 3);
    for (const auto& s : basis.solutions) CHECK(vanishes(l, parse_frame("0"), s));
    // Gauss's log block survives: some solution has ln^1 whose top part is the 2F1 series up to scale
    auto g = frobenius_solve(gauss, parse_frame("0"), 25);
    bool found = false;
    for (const auto& s : basis.solutions)
        if (s.depth >= 1 && s.exponent == 0) {
            const auto& top = s.top();
            if (top[0] != 0 && top[1] / top[0] == g.solutions[0].parts[0][1]) found = true;
        }
    CHECK(found);
}

TEST_CASE("mod-p frobenius matches the exact one") {
    u32 p = 32749;
    auto ex = frobenius_solve(gauss, parse_frame("0"), 20);
    auto mp = frobenius_solve(reduce(gauss, p), parse_frame("0"), 20);
    REQUIRE(mp.solutions.size() == 2);
    PrimeField f(p);
    for (std::size_t n = 0; n < 20; ++n) CHECK(mp.solutions[0].parts[0][n].v == f.from_mpq(ex.solutions[0].parts[0][n]));
}

TEST_CASE("probing a right factor") {
    u32 p = 32749;
    auto a = theta_from_rows({{2}, {1, 1}});
    auto l = multiply(a, gauss);
    auto lp = reduce(l, p);
    auto basis = frobenius_solve(lp, parse_frame("0"), 60);
    std::optional<ThetaOpP> got;
    for (const auto& s : basis.solutions)
        if (s.depth == 1) got = probe_right_factor(lp, s, 2, 4);
    REQUIRE(got);
    CHECK(*got == lex_normalized(reduce(gauss, p)));

    // irreducible order three: the deepest solution has no small annihilator
    auto cp = reduce(clausen, 101);
    auto cb = frobenius_solve(cp, parse_frame("0"), 40);
    REQUIRE(cb.solutions.size() == 3);
    CHECK_FALSE(probe_right_factor(cp, cb.solutions[2], 2, 6));
    CHECK_FALSE(probe_sweep(cp, cb.solutions[0], cb.solutions[1], 2, 6));
}

TEST_CASE("accidental roots") {
    auto roots = split_roots(h, 32719);
    CHECK(roots == std::vector<u32>{8973, 31925});
    // 4 (w - 8973)(w - 31925) = 1 + 3w + 4w^2 mod 32719
    PrimeField f(32719);
    CHECK(f.mul(4, f.mul(8973, 31925)) == 1);
    // discriminant -7 is a non-residue mod 3
    CHECK(split_roots(h, 3).empty());

    auto l3 = planted_l3();
    auto big = multiply(theta_from_rows({{2}, {1, 1}}), l3);
    auto bp = reduce(big, 32719);
    AcRootOptions o;
    std::vector<ThetaOpP> per_root;
    for (u32 r : roots) {
        o.root = r;
        auto res = accidental_root_factor(bp, h, o);
        CHECK(res.M == 3);
        CHECK(res.K == 1);
        per_root.push_back(res.op);
    }
    CHECK(per_root[0] == per_root[1]);
    CHECK(per_root[0] == lex_normalized(reduce(l3, 32719)));
    CHECK_THROWS_AS(accidental_root_factor(reduce(big, 3), h), NoSplitRoot);
}

TEST_CASE("log solution text round trip") {
    auto b = frobenius_solve(gauss, parse_frame("0"), 8);
    std::string t = write_logsol(b.solutions[1]);
    CHECK(t.rfind("logsol exponent=0 depth=1 count=8 prime=exact\n", 0) == 0);
    std::istringstream in(t + write_logsol(b.solutions[0]));
    auto back = read_logsols(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].sol.parts == b.solutions[1].parts);
    CHECK(back[0].sol.depth == 1);
}
