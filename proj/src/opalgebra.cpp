#include "odeforge/opalgebra.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace odeforge {

namespace detail {
long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
}  // namespace detail

std::vector<mpq_class> apply(const ThetaOpQ& op, const std::vector<mpq_class>& s) {
    int D = op.degree();
    if (long(s.size()) <= D) throw SeriesTooShort();
    return apply_coeffs(op, s, mpq_class(0), 0, s.size() - D);
}

namespace {

using QP = Poly<mpq_class>;

// num/den with den monic and coprime to num
struct RatFunc {
    QP num, den{mpq_class(1)};

    RatFunc() = default;
    RatFunc(QP n, QP d) : num(std::move(n)), den(std::move(d)) { reduce(); }
    explicit RatFunc(QP n) : num(std::move(n)) { poly::trim(num); }

    void reduce() {
        poly::trim(num);
        poly::trim(den);
        if (num.empty()) {
            den = {mpq_class(1)};
            return;
        }
        QP g = poly::gcd(num, den);
        if (g.size() > 1) {
            num = poly::divmod(num, g).first;
            den = poly::divmod(den, g).first;
        }
        mpq_class lead = den.back();
        if (lead != 1) {
            num = poly::scale(num, mpq_class(1 / lead));
            den = poly::scale(den, mpq_class(1 / lead));
        }
    }
    bool is_zero() const { return num.empty(); }
};

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.den == b.den) return RatFunc(poly::add(a.num, b.num), a.den);
    return RatFunc(poly::add(poly::mul(a.num, b.den), poly::mul(b.num, a.den)), poly::mul(a.den, b.den));
}
RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    if (a.den == b.den) return RatFunc(poly::sub(a.num, b.num), a.den);
    return RatFunc(poly::sub(poly::mul(a.num, b.den), poly::mul(b.num, a.den)), poly::mul(a.den, b.den));
}
RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(poly::mul(a.num, b.num), poly::mul(a.den, b.den));
}
RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    return RatFunc(poly::mul(a.num, b.den), poly::mul(a.den, b.num));
}

// theta f = w f'
RatFunc theta_of(const RatFunc& f) {
    QP n = poly::sub(poly::mul(poly::deriv(f.num), f.den), poly::mul(f.num, poly::deriv(f.den)));
    return RatFunc(poly::shift_up(n, 1), poly::mul(f.den, f.den));
}

using RatOp = std::vector<RatFunc>;  // coefficient of theta^i

int order_of(const RatOp& op) {
    for (int i = int(op.size()) - 1; i >= 0; --i)
        if (!op[i].is_zero()) return i;
    return -1;
}

RatOp to_ratop(const ThetaOpQ& op) {
    RatOp r;
    for (const auto& row : op.rows) r.push_back(RatFunc(row));
    return r;
}

// c theta^s o r
RatOp shifted_product(const RatFunc& c, int s, const RatOp& r) {
    RatOp out(r.size() + s);
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (r[k].is_zero()) continue;
        RatFunc d = r[k];  // theta^t applied to r_k
        for (int t = 0; t <= s; ++t) {
            if (t > 0) d = theta_of(d);
            if (d.is_zero()) break;
            RatFunc term = c * d * RatFunc(QP{mpq_class(detail::binom(s, t))});
            out[s - t + k] = out[s - t + k] + term;
        }
    }
    return out;
}

}  // namespace

RightDivision right_divide(const ThetaOpQ& l, const ThetaOpQ& r) {
    if (r.order() < 1) throw std::invalid_argument("right_divide: divisor must have order >= 1");
    RatOp rem = to_ratop(l), rr = to_ratop(r);
    int mr = order_of(rr);
    RatOp q;
    for (int ord = order_of(rem); ord >= mr; ord = order_of(rem)) {
        int s = ord - mr;
        RatFunc c = rem[ord] / rr[mr];
        if (int(q.size()) <= s) q.resize(s + 1);
        q[s] = q[s] + c;
        RatOp sub = shifted_product(c, s, rr);
        if (rem.size() < sub.size()) rem.resize(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i) rem[i] = rem[i] - sub[i];
        rem[ord] = RatFunc();  // exact cancellation
    }
    // clear denominators jointly
    QP m{mpq_class(1)};
    for (const auto* op : {&q, &rem})
        for (const auto& c : *op) {
            QP g = poly::gcd(m, c.den);
            m = poly::divmod(poly::mul(m, c.den), g).first;
        }
    std::vector<QP> qrows, rrows;
    for (const auto& c : q) qrows.push_back(poly::divmod(poly::mul(c.num, m), c.den).first);
    for (const auto& c : rem) rrows.push_back(poly::divmod(poly::mul(c.num, m), c.den).first);
    // integral primitive content across both
    mpz_class L = 1, G = 0;
    for (const auto* rows : {&qrows, &rrows})
        for (const auto& p : *rows) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), lcm_denominators(p).get_mpz_t());
    for (const auto* rows : {&qrows, &rrows})
        for (const auto& p : *rows)
            for (const auto& c : p) {
                mpz_class v = mpz_class(c * L);
                mpz_gcd(G.get_mpz_t(), G.get_mpz_t(), v.get_mpz_t());
            }
    mpq_class s = G == 0 ? mpq_class(1) : mpq_class(L, G);
    s.canonicalize();
    for (auto& p : qrows) p = poly::scale(p, s);
    for (auto& p : rrows) p = poly::scale(p, s);
    RightDivision out;
    out.quotient = ThetaOpQ(std::move(qrows), mpq_class(1));
    out.remainder = ThetaOpQ(std::move(rrows), mpq_class(1));
    out.multiplier = poly::scale(m, s);
    return out;
}

bool right_divides(const ThetaOpQ& r, const ThetaOpQ& l) {
    return right_divide(l, r).remainder.is_zero();
}

ThetaOpQ annihilator_of_rational(const Poly<mpq_class>& num0, const Poly<mpq_class>& den0) {
    QP num = num0, den = den0;
    poly::trim(num);
    poly::trim(den);
    if (num.empty()) throw ZeroFunction();
    if (den.empty()) throw ZeroFunction("zero denominator");
    // f'/f = (N'D - N D')/(N D); operator N D theta - w (N'D - N D')
    QP a = poly::mul(num, den);
    QP b = poly::shift_up(poly::sub(poly::mul(poly::deriv(num), den), poly::mul(num, poly::deriv(den))), 1);
    b = poly::scale(b, mpq_class(-1));
    QP g = b.empty() ? poly::monic(a) : poly::gcd(a, b);
    if (g.size() > 1) {
        a = poly::divmod(a, g).first;
        if (!b.empty()) b = poly::divmod(b, g).first;
    }
    ThetaOpQ op({b, a}, mpq_class(1));
    return primitive(op);
}

std::string to_string(Curvature c) {
    switch (c) {
        case Curvature::zero: return "zero";
        case Curvature::nilpotent: return "nilpotent";
        default: return "neither";
    }
}

namespace {

using PP = Poly<Zp>;
using PMat = std::vector<std::vector<PP>>;

PMat mat_mul(const PMat& a, const PMat& b) {
    std::size_t n = a.size();
    PMat c(n, std::vector<PP>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k].empty()) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (!b[k][j].empty()) c[i][j] = poly::add(c[i][j], poly::mul(a[i][k], b[k][j]));
        }
    return c;
}

bool mat_zero(const PMat& a) {
    for (const auto& row : a)
        for (const auto& e : row)
            if (!e.empty()) return false;
    return true;
}

}  // namespace

CurvatureReport p_curvature(const ThetaOpP& op, bool check_zero) {
    if (op.is_zero()) throw BadReduction("zero operator");
    u32 p = op.one.p;
    int M = op.order();
    CurvatureReport rep{Curvature::zero, 1, p};
    if (M == 0) return rep;
    DOp<Zp> d = to_dform(op);
    const PP& h = d.b[M];
    if (h.empty()) throw BadReduction();
    Zp one(1, p);
    // Y' = (B/h) Y for Y = (y, y', ..., y^(M-1))
    PMat B(M, std::vector<PP>(M));
    for (int r = 0; r + 1 < M; ++r) B[r][r + 1] = h;
    for (int k = 0; k < M; ++k) B[M - 1][k] = poly::scale(d.b[k], -one);
    PP hp = poly::deriv(h);
    // A_k = N_k / h^k,  N_{k+1} = N_k' h - k h' N_k + N_k B
    PMat N = B;
    for (u32 k = 1; k < p; ++k) {
        PMat next = mat_mul(N, B);
        Zp kk = Zp::of(long(k), p);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) {
                PP t = poly::mul(poly::deriv(N[i][j]), h);
                t = poly::sub(t, poly::scale(poly::mul(hp, N[i][j]), kk));
                next[i][j] = poly::add(next[i][j], t);
            }
        N = std::move(next);
    }
    if (mat_zero(N)) {
        rep.kind = check_zero ? Curvature::zero : Curvature::nilpotent;
        rep.witness_power = 1;
        return rep;
    }
    PMat P = N;
    for (int m = 2; m <= M; ++m) {
        P = mat_mul(P, N);
        if (mat_zero(P)) {
            rep.kind = Curvature::nilpotent;
            rep.witness_power = m;
            return rep;
        }
    }
    rep.kind = Curvature::neither;
    rep.witness_power = 0;
    return rep;
}

CurvatureReport p_curvature(const ThetaOpQ& op, u32 p, bool check_zero) {
    if (op.is_zero()) throw BadReduction("zero operator");
    auto red = reduce(op, p);
    if (red.order() != op.order()) throw BadReduction("head polynomial vanishes modulo " + std::to_string(p));
    return p_curvature(red, check_zero);
}

long symmetric_power_order(long q, long n) {
    if (q < 1 || n < 1) throw std::invalid_argument("symmetric_power_order needs q, n >= 1");
    // C(q+n-1, n)
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(q + n - 1), static_cast<unsigned long>(n));
    return r.get_si();
}

std::pair<long, long> symmetric_product_order_bounds(long q1, long q2) {
    if (q1 < 1 || q2 < 1) throw std::invalid_argument("orders must be >= 1");
    return {q1 + q2 - 1, q1 * q2};
}

BlockScheme::BlockScheme(std::string pt, std::vector<int> b) : point(std::move(pt)), blocks(std::move(b)) {
    std::sort(blocks.begin(), blocks.end(), std::greater<int>());
}

int BlockScheme::solutions() const {
    int s = 0;
    for (int n : blocks) s += n + 1;
    return s;
}

std::string BlockScheme::describe() const {
    std::map<int, int, std::greater<int>> count;
    for (int n : blocks) ++count[n];
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (auto& [n, c] : count) {
        out << (first ? "" : ", ") << c << "xBL" << n;
        first = false;
    }
    out << "}";
    return out.str();
}

BlockScheme block_product_scheme(const BlockScheme& a, const BlockScheme& b) {
    if (a.point != b.point) throw PointMismatch(a.point + " vs " + b.point);
    std::vector<int> out;
    for (int x : a.blocks)
        for (int y : b.blocks)
            for (int n = x + y; n >= std::abs(x - y); n -= 2) out.push_back(n);
    return BlockScheme(a.point, out);
}

BlockScheme block_symmetric_power(const BlockScheme& a, int n) {
    // nilpotent monodromy as an sl2 weight multiset: BLk carries k, k-2, ..., -k
    std::vector<int> weights;
    for (int k : a.blocks)
        for (int w = k; w >= -k; w -= 2) weights.push_back(w);
    std::map<int, long> count;
    std::function<void(std::size_t, int, int)> rec = [&](std::size_t start, int left, int sum) {
        if (left == 0) {
            ++count[sum];
            return;
        }
        for (std::size_t i = start; i < weights.size(); ++i) rec(i, left - 1, sum + weights[i]);
    };
    rec(0, n, 0);
    std::vector<int> blocks;
    while (!count.empty()) {
        int top = count.rbegin()->first;
        blocks.push_back(top);
        for (int w = top; w >= -top; w -= 2)
            if (--count[w] == 0) count.erase(w);
    }
    return BlockScheme(a.point, blocks);
}

namespace {

void partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int k = std::min(n, max_part); k >= 1; --k) {
        cur.push_back(k - 1);
        partitions(n - k, k, cur, out);
        cur.pop_back();
    }
}

std::vector<BlockScheme> all_schemes(const std::string& point, int order) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    partitions(order, order, cur, parts);
    std::vector<BlockScheme> out;
    for (auto& p : parts) out.emplace_back(point, p);
    return out;
}

}  // namespace

std::string SymVerdict::summary() const {
    std::ostringstream out;
    out << (not_ruled_out ? "not ruled out" : "ruled out");
    for (const auto& p : points) out << "\n  w=" << p.point << ": " << p.explanation;
    return out.str();
}

SymVerdict check_sym_decomposition(const std::vector<BlockScheme>& target, const std::vector<int>& config,
                                   SymMode mode) {
    SymVerdict v;
    v.not_ruled_out = true;
    long order = 1;
    std::string label;
    if (mode == SymMode::power) {
        if (config.size() != 2) throw std::invalid_argument("power mode expects {order, power}");
        order = symmetric_power_order(config[0], config[1]);
        label = "symmetric power " + std::to_string(config[1]) + " of order " + std::to_string(config[0]);
    } else {
        for (std::size_t i = 0; i < config.size(); ++i) {
            order *= config[i];
            label += (i ? "." : "") + std::to_string(config[i]);
        }
        label = "symmetric product " + label;
    }
    for (const auto& t : target) {
        PointVerdict pv;
        pv.point = t.point;
        if (t.solutions() != order) {
            pv.explanation = "ruled out: " + label + " has order " + std::to_string(order) + ", target scheme " +
                             t.describe() + " has " + std::to_string(t.solutions()) + " solutions";
        } else if (mode == SymMode::power) {
            for (const auto& s : all_schemes(t.point, config[0]))
                if (block_symmetric_power(s, config[1]).blocks == t.blocks) {
                    pv.not_ruled_out = true;
                    pv.explanation = "not ruled out: factor scheme " + s.describe();
                    break;
                }
            if (!pv.not_ruled_out)
                pv.explanation = "ruled out: no factor scheme of order " + std::to_string(config[0]) +
                                 " has a symmetric power equal to " + t.describe();
        } else {
            // fold over all scheme choices per factor
            std::vector<std::vector<BlockScheme>> choices;
            for (int q : config) choices.push_back(all_schemes(t.point, q));
            std::vector<std::size_t> idx(config.size(), 0);
            while (true) {
                BlockScheme prod(t.point, {0});
                for (std::size_t f = 0; f < config.size(); ++f) prod = block_product_scheme(prod, choices[f][idx[f]]);
                if (prod.blocks == t.blocks) {
                    pv.not_ruled_out = true;
                    std::string w = "not ruled out: factor schemes ";
                    for (std::size_t f = 0; f < config.size(); ++f)
                        w += (f ? " x " : "") + choices[f][idx[f]].describe();
                    pv.explanation = w;
                    break;
                }
                std::size_t f = 0;
                while (f < idx.size() && ++idx[f] == choices[f].size()) idx[f++] = 0;
                if (f == idx.size()) break;
            }
            if (!pv.not_ruled_out)
                pv.explanation = "ruled out: no assignment of blocks to the factors reproduces " + t.describe();
        }
        v.not_ruled_out = v.not_ruled_out && pv.not_ruled_out;
        v.points.push_back(pv);
    }
    return v;
}

std::string format_dform(const ThetaOpQ& op) {
    DOp<mpq_class> d = to_dform(op);
    std::ostringstream out;
    bool first = true;
    for (int k = int(d.b.size()) - 1; k >= 0; --k) {
        if (d.b[k].empty()) continue;
        out << (first ? "" : " + ") << "(" << format_qpoly(d.b[k]) << ")";
        if (k == 1) out << "*D";
        if (k > 1) out << "*D^" << k;
        first = false;
    }
    return first ? "0" : out.str();
}

}  // namespace odeforge
