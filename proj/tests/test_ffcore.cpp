#include "doctest.h"

#include <random>
#include <sstream>

#include "odeforge/ffcore.hpp"
#include "odeforge/textio.hpp"

using namespace odeforge;

TEST_CASE("prime field construction") {
    CHECK_NOTHROW(PrimeField(32749));
    CHECK_THROWS_AS(PrimeField(32747 * 3), NotPrime);
    CHECK_THROWS_AS(PrimeField(2), NotPrime);
    CHECK_THROWS_AS(PrimeField(65537), NotPrime);  // above the default bound
    CHECK_NOTHROW(PrimeField(65537, PrimeField::word_limit));
}

TEST_CASE("default primes descend below 2^15") {
    auto ps = default_primes(5);
    REQUIRE(ps.size() == 5);
    CHECK(ps[0] == 32749);
    CHECK(ps[1] == 32719);
    CHECK(ps[4] == 32707);
    for (std::size_t i = 1; i < ps.size(); ++i) CHECK(ps[i] < ps[i - 1]);
}

TEST_CASE("field inverses and rational images") {
    PrimeField f(32749);
    std::mt19937 rng(7);
    for (int t = 0; t < 2000; ++t) {
        u32 a = 1 + rng() % (f.p() - 1);
        CHECK(f.mul(a, f.inv(a)) == 1);
    }
    CHECK(f.from_mpq(mpq_class(1, 2)) == (f.p() + 1) / 2);
    CHECK(f.from_int(-1) == f.p() - 1);
    CHECK_THROWS_AS(f.from_mpq(mpq_class(1, 32749)), NonInvertibleLeadingTerm);
    CHECK(f.signed_value(f.p() - 3) == -3);
}

TEST_CASE("series arithmetic") {
    PrimeField f7(7);
    PrimeSeries a(f7, {1, 1, 0, 0, 0});
    PrimeSeries b(f7, {1, 6, 0, 0, 0});
    auto c = series_mul(a, b);
    CHECK(c.coeffs == std::vector<u32>{1, 0, 6, 0, 0});

    PrimeField f(32749);
    auto r = series_recip(PrimeSeries(f, {1, f.from_int(-2), 0, 0, 0, 0, 0, 0, 0, 0}));
    u32 pw = 1;
    for (std::size_t n = 0; n < r.size(); ++n) {
        CHECK(r.coeffs[n] == pw);
        pw = f.mul(pw, 2);
    }

    PrimeSeries geo(f, std::vector<u32>(12, 1));
    PrimeSeries sq(f, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 2);  // y^2
    auto comp = series_compose(geo, sq);
    for (long n = 0; n < comp.end(); ++n) CHECK(comp.at(n) == (n % 2 == 0 ? 1u : 0u));

    CHECK_THROWS_AS(series_mul(a, PrimeSeries(f, {1})), FieldMismatch);
    CHECK_THROWS_AS(series_recip(PrimeSeries(f, {0, 1})), NonInvertibleLeadingTerm);
}

TEST_CASE("normalized moves leading zeros into the offset") {
    PrimeField f(101);
    auto s = PrimeSeries(f, {0, 0, 5, 1}).normalized();
    CHECK(s.offset == 2);
    CHECK(s.coeffs == std::vector<u32>{5, 1});
}

TEST_CASE("nullspace") {
    PrimeField f(32749);
    FpMatrix id(3, 3);
    for (int i = 0; i < 3; ++i) id(i, i) = 1;
    CHECK(nullspace(id, f).empty());
    CHECK(nullspace(FpMatrix(2, 3), f).size() == 3);

    // planted rank 50 in 50 x 60
    std::mt19937 rng(3);
    FpMatrix m(50, 60);
    for (auto& e : m.entries) e = rng() % f.p();
    auto ker = nullspace(m, f);
    CHECK(rank(m, f) == 50);
    REQUIRE(ker.size() == 10);
    for (const auto& v : ker)
        for (u32 x : mat_vec(m, v, f)) CHECK(x == 0);
}

TEST_CASE("series text round trip") {
    PrimeField f(32749);
    PrimeSeries s(f, {3, 0, 32748, 17}, 2, "y");
    std::string text = write_series(to_text(s));
    CHECK(text.rfind("series var=y prime=32749 offset=2 count=4\n", 0) == 0);
    std::istringstream in(text);
    auto back = to_prime_series(read_series(in));
    CHECK(back.coeffs == s.coeffs);
    CHECK(back.offset == 2);
    CHECK(back.var == "y");

    std::istringstream bad("series var=w prime=32749 offset=0 count=3\n1\n2\n");
    CHECK_THROWS_AS(read_series(bad), FormatError);
    std::istringstream exact("series var=w prime=exact offset=0 count=2\n1/2\n-3\n");
    auto e = read_series(exact);
    CHECK(e.prime == 0);
    CHECK(e.coeffs[0] == mpq_class(1, 2));
}
