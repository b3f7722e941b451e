#include "odeforge/theta.hpp"

namespace odeforge {

long stirling2(int n, int k) {
    std::vector<std::vector<long>> s(n + 1, std::vector<long>(n + 1, 0));
    s[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= i; ++j) s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
    return k <= n ? s[n][k] : 0;
}

long stirling1(int n, int k) {
    // signed: falling factorial x(x-1)...(x-n+1) = sum s1(n,k) x^k
    std::vector<std::vector<long>> s(n + 1, std::vector<long>(n + 1, 0));
    s[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= i; ++j) s[i][j] = s[i - 1][j - 1] - long(i - 1) * s[i - 1][j];
    return k <= n ? s[n][k] : 0;
}

ThetaOpP reduce(const ThetaOpQ& op, u32 p) {
    std::vector<Poly<Zp>> rows;
    for (const auto& r : op.rows) rows.push_back(reduce(r, p));
    return ThetaOpP(std::move(rows), Zp(1, p));
}

ThetaOpQ primitive(const ThetaOpQ& op) {
    if (op.is_zero()) return op;
    mpz_class l = 1, g = 0;
    int wpow = 1 << 30;
    for (const auto& r : op.rows) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), lcm_denominators(r).get_mpz_t());
        if (!r.empty()) wpow = std::min(wpow, poly::low_order(r));
    }
    for (const auto& r : op.rows)
        for (const auto& c : r) {
            mpz_class v = mpz_class(c * l);
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        }
    mpq_class s(l, g);
    s.canonicalize();
    // sign: first nonzero coefficient in lexicographic order positive
    for (const auto& r : op.rows) {
        bool done = false;
        for (const auto& c : r)
            if (sgn(c)) {
                if (sgn(c) < 0) s = -s;
                done = true;
                break;
            }
        if (done) break;
    }
    std::vector<Poly<mpq_class>> rows;
    for (const auto& r : op.rows) {
        Poly<mpq_class> q = poly::scale(r, s);
        if (!q.empty()) q.erase(q.begin(), q.begin() + wpow);
        rows.push_back(q);
    }
    return ThetaOpQ(std::move(rows), mpq_class(1));
}

ThetaOpQ theta_from_rows(const std::vector<std::vector<long>>& rows) {
    std::vector<Poly<mpq_class>> r;
    for (const auto& row : rows) {
        Poly<mpq_class> p;
        for (long v : row) p.push_back(mpq_class(v));
        r.push_back(poly::trim(p));
    }
    return ThetaOpQ(std::move(r), mpq_class(1));
}

}  // namespace odeforge
