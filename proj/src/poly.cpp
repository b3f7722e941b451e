#include "odeforge/poly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace odeforge {

mpz_class lcm_denominators(const Poly<mpq_class>& a) {
    mpz_class l = 1;
    for (const auto& c : a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    return l;
}

mpz_class gcd_numerators(const Poly<mpq_class>& a) {
    mpz_class g = 0;
    for (const auto& c : a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    return g;
}

namespace {

struct PolyParser {
    const std::string& s;
    std::string var;
    std::size_t i = 0;

    void skip() { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; }

    bool at_end() { skip(); return i >= s.size(); }

    mpq_class number() {
        skip();
        std::size_t j = i;
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '/')) ++j;
        mpq_class q(s.substr(i, j - i));
        q.canonicalize();
        i = j;
        return q;
    }

    long exponent() {
        skip();
        if (i < s.size() && s[i] == '^') {
            ++i;
            skip();
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j == i) throw FormatError("expected exponent in polynomial: " + s);
            long e = std::stol(s.substr(i, j - i));
            i = j;
            return e;
        }
        return 1;
    }

    bool take_var() {
        skip();
        if (s.compare(i, var.size(), var) == 0) {
            i += var.size();
            return true;
        }
        return false;
    }

    Poly<mpq_class> parse() {
        std::map<long, mpq_class> terms;
        bool first = true;
        while (!at_end()) {
            int sign = 1;
            skip();
            if (s[i] == '+' || s[i] == '-') {
                sign = s[i] == '-' ? -1 : 1;
                ++i;
            } else if (!first) {
                throw FormatError("expected + or - in polynomial: " + s);
            }
            first = false;
            skip();
            mpq_class coef = 1;
            long e = 0;
            bool have_num = false;
            if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                coef = number();
                have_num = true;
                skip();
                if (i < s.size() && s[i] == '*') ++i;
            }
            if (take_var()) {
                e = exponent();
            } else if (!have_num) {
                throw FormatError("bad term in polynomial: " + s);
            }
            terms[e] += sign * coef;
        }
        Poly<mpq_class> r;
        for (auto& [e, c] : terms) {
            if (r.size() <= std::size_t(e)) r.resize(e + 1);
            r[e] += c;
        }
        return poly::trim(r);
    }
};

}  // namespace

Poly<mpq_class> parse_qpoly(const std::string& text, const std::string& var) {
    PolyParser p{text, var};
    return p.parse();
}

std::string format_qpoly(const Poly<mpq_class>& a, const std::string& var) {
    if (a.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& c = a[k];
        if (sgn(c) == 0) continue;
        mpq_class m = abs(c);
        if (sgn(c) < 0) out << "-";
        else if (!first) out << "+";
        if (k == 0) out << m.get_str();
        else {
            if (m != 1) out << m.get_str() << "*";
            out << var;
            if (k > 1) out << "^" << k;
        }
        first = false;
    }
    return out.str();
}

Poly<Zp> reduce(const Poly<mpq_class>& a, u32 p) {
    PrimeField F(p, PrimeField::word_limit);
    Poly<Zp> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = Zp(F.from_mpq(a[i]), p);
    return poly::trim(r);
}

namespace {

Poly<Zp> mulmod(const Poly<Zp>& a, const Poly<Zp>& b, const Poly<Zp>& m) {
    return poly::divmod(poly::mul(a, b), m).second;
}

Poly<Zp> powmod(Poly<Zp> base, u64 e, const Poly<Zp>& m, u32 p) {
    Poly<Zp> r{Zp(1, p)};
    base = poly::divmod(base, m).second;
    while (e) {
        if (e & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return r;
}

void split_roots(const Poly<Zp>& g, u32 p, std::vector<u32>& out) {
    int d = poly::deg(g);
    if (d <= 0) return;
    if (d == 1) {
        Poly<Zp> m = poly::monic(g);
        out.push_back((-m[0]).v);
        return;
    }
    for (u32 a = 1;; ++a) {
        Poly<Zp> x_plus_a{Zp(a % p, p), Zp(1, p)};
        Poly<Zp> h = powmod(x_plus_a, (u64(p) - 1) / 2, g, p);
        h = poly::sub(h, Poly<Zp>{Zp(1, p)});
        Poly<Zp> f = poly::gcd(g, h);
        int fd = poly::deg(f);
        if (fd > 0 && fd < d) {
            split_roots(f, p, out);
            split_roots(poly::divmod(g, f).first, p, out);
            return;
        }
    }
}

}  // namespace

std::vector<u32> roots_mod_p(const Poly<Zp>& a0, u32 p) {
    Poly<Zp> a = a0;
    poly::trim(a);
    std::vector<u32> out;
    if (a.size() <= 1) return out;
    if (p < (1u << 16)) {
        for (u32 x = 0; x < p; ++x)
            if (poly::eval(a, Zp(x, p)).v == 0) out.push_back(x);
        return out;
    }
    a = poly::monic(a);
    Poly<Zp> x{Zp(0, p), Zp(1, p)};
    Poly<Zp> xp = powmod(x, p, a, p);
    Poly<Zp> g = poly::gcd(a, poly::sub(xp, x));
    if (!g.empty() && g[0].v == 0) {
        out.push_back(0);
        g = poly::divmod(g, x).first;
    }
    split_roots(g, p, out);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<mpz_class> divisors(mpz_class n) {
    n = abs(n);
    std::vector<std::pair<mpz_class, int>> fac;
    for (unsigned long d = 2; d < 100000 && mpz_class(d) * d <= n; ++d) {
        int e = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            n /= d;
            ++e;
        }
        if (e) fac.push_back({mpz_class(d), e});
    }
    if (n > 1) fac.push_back({n, 1});
    std::vector<mpz_class> divs{1};
    for (auto& [q, e] : fac) {
        std::size_t cur = divs.size();
        mpz_class pw = 1;
        for (int k = 1; k <= e; ++k) {
            pw *= q;
            for (std::size_t i = 0; i < cur; ++i) divs.push_back(divs[i] * pw);
        }
    }
    return divs;
}

}  // namespace

std::vector<std::pair<mpq_class, int>> rational_roots(const Poly<mpq_class>& a0, Poly<mpq_class>* rest) {
    Poly<mpq_class> a = a0;
    poly::trim(a);
    std::vector<std::pair<mpq_class, int>> out;
    if (a.size() <= 1) {
        if (rest) *rest = a;
        return out;
    }
    int z = poly::low_order(a);
    if (z > 0) {
        out.push_back({mpq_class(0), z});
        a.erase(a.begin(), a.begin() + z);
    }
    if (a.size() > 1) {
        mpz_class l = lcm_denominators(a);
        mpz_class lo = mpz_class(a.front() * l), hi = mpz_class(a.back() * l);
        auto dn = divisors(lo), dd = divisors(hi);
        std::set<mpq_class> cands;
        for (auto& n : dn)
            for (auto& d : dd) {
                mpq_class q(n, d);
                q.canonicalize();
                cands.insert(q);
                cands.insert(-q);
            }
        for (const auto& q : cands) {
            Poly<mpq_class> f{-q, mpq_class(1)};
            int m = poly::multiplicity(a, f);
            if (m) {
                out.push_back({q, m});
                for (int k = 0; k < m; ++k) a = poly::divmod(a, f).first;
                if (a.size() <= 1) break;
            }
        }
    }
    if (rest) *rest = a;
    std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.first < y.first; });
    return out;
}

}  // namespace odeforge
