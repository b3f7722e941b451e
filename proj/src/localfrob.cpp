#include "odeforge/localfrob.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "odeforge/textio.hpp"

namespace odeforge {

std::string LocalFrame::label() const {
    switch (kind) {
        case Kind::infinity: return "inf";
        case Kind::modp: return "modp:" + std::to_string(modp_center);
        case Kind::algebraic: return "root:" + format_qpoly(minpoly);
        default: return center.get_str();
    }
}

LocalFrame parse_frame(const std::string& text) {
    LocalFrame f;
    if (text == "inf" || text == "infinity") {
        f.kind = LocalFrame::Kind::infinity;
    } else if (text.rfind("modp:", 0) == 0) {
        f.kind = LocalFrame::Kind::modp;
        f.modp_center = u32(std::stoul(text.substr(5)));
    } else if (text.rfind("root:", 0) == 0) {
        f.kind = LocalFrame::Kind::algebraic;
        f.minpoly = parse_qpoly(text.substr(5));
    } else {
        f.center = parse_rational(text);
    }
    return f;
}

ThetaOpQ local_operator(const ThetaOpQ& op, const LocalFrame& frame) {
    switch (frame.kind) {
        case LocalFrame::Kind::point:
            return sgn(frame.center) == 0 ? op : recenter(op, frame.center, mpq_class(1));
        case LocalFrame::Kind::infinity: return at_infinity(op);
        case LocalFrame::Kind::modp: throw NotComputable("a mod-p point needs an operator over F_p");
        default:
            throw NotComputable("center is an irrational algebraic number; use the accidental-root path modulo p");
    }
}

ThetaOpP local_operator(const ThetaOpP& op, const LocalFrame& frame) {
    u32 p = op.one.p;
    switch (frame.kind) {
        case LocalFrame::Kind::point: {
            Zp c(PrimeField(p, PrimeField::word_limit).from_mpq(frame.center), p);
            return c.v == 0 ? op : recenter(op, c, op.one);
        }
        case LocalFrame::Kind::modp: {
            Zp c(frame.modp_center % p, p);
            return c.v == 0 ? op : recenter(op, c, op.one);
        }
        case LocalFrame::Kind::infinity: return at_infinity(op);
        default: throw NotComputable("algebraic center: pick one of its roots modulo p");
    }
}

namespace {

template <class T>
void fill_head_data(const ThetaOp<T>& local, Indicial<T>& ind) {
    // order of vanishing at x = 0 of the d/dx head, relative to the
    // least-shifted coefficient
    DOp<T> d = to_dform(local);
    int lo = 1 << 30;
    for (std::size_t k = 0; k < d.b.size(); ++k)
        if (!d.b[k].empty()) lo = std::min(lo, poly::low_order(d.b[k]));
    ind.head_multiplicity = poly::low_order(d.b.back()) - lo;
    ind.ordinary = ind.head_multiplicity == 0;
}

}  // namespace

Indicial<mpq_class> indicial(const ThetaOpQ& op, const LocalFrame& frame) {
    if (op.is_zero()) throw NotComputable("zero operator");
    ThetaOpQ local = local_operator(op, frame);
    Indicial<mpq_class> ind;
    ind.poly = indicial_at_zero(local);
    Poly<mpq_class> rest;
    ind.exponents = rational_roots(ind.poly, &rest);
    if (poly::deg(rest) >= 1) ind.unresolved = rest;
    fill_head_data(local, ind);
    return ind;
}

Indicial<Zp> indicial(const ThetaOpP& op, const LocalFrame& frame) {
    if (op.is_zero()) throw NotComputable("zero operator");
    ThetaOpP local = local_operator(op, frame);
    u32 p = op.one.p;
    Indicial<Zp> ind;
    ind.poly = indicial_at_zero(local);
    Poly<Zp> rest = ind.poly;
    for (u32 r : roots_mod_p(ind.poly, p)) {
        Poly<Zp> lin{Zp(r ? p - r : 0, p), Zp(1, p)};
        int m = poly::multiplicity(rest, lin);
        for (int k = 0; k < m; ++k) rest = poly::divmod(rest, lin).first;
        ind.exponents.push_back({Zp(r, p), m});
    }
    if (poly::deg(rest) >= 1) ind.unresolved = rest;
    fill_head_data(local, ind);
    return ind;
}

std::vector<ExponentClass<mpq_class>> exponent_classes(const Indicial<mpq_class>& ind) {
    auto ex = ind.exponents;
    std::sort(ex.begin(), ex.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<ExponentClass<mpq_class>> out;
    std::vector<bool> used(ex.size(), false);
    for (std::size_t i = 0; i < ex.size(); ++i) {
        if (used[i]) continue;
        ExponentClass<mpq_class> cl{ex[i].first, {}};
        for (std::size_t j = i; j < ex.size(); ++j) {
            mpq_class d = ex[j].first - ex[i].first;
            if (!used[j] && d.get_den() == 1) {
                used[j] = true;
                cl.roots.push_back({d.get_num().get_si(), ex[j].second});
            }
        }
        out.push_back(cl);
    }
    return out;
}

std::vector<ExponentClass<Zp>> exponent_classes(const Indicial<Zp>& ind, std::size_t count) {
    const auto& ex = ind.exponents;
    std::size_t m = ex.size();
    if (m == 0) return {};
    u32 p = ex[0].first.p;
    auto diff = [&](std::size_t a, std::size_t b) { return (u64(ex[b].first.v) + p - ex[a].first.v) % p; };
    // a -> b when b = a + k with 0 < k < count
    std::vector<bool> has_pred(m, false);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (a != b && diff(a, b) > 0 && diff(a, b) < count) has_pred[b] = true;
    std::vector<ExponentClass<Zp>> out;
    std::vector<bool> seen(m, false);
    for (std::size_t s = 0; s < m; ++s) {
        if (has_pred[s] || seen[s]) continue;
        ExponentClass<Zp> cl{ex[s].first, {}};
        std::vector<std::size_t> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            std::size_t a = stack.back();
            stack.pop_back();
            cl.roots.push_back({long(diff(s, a)), ex[a].second});
            for (std::size_t b = 0; b < m; ++b)
                if (!seen[b] && diff(a, b) > 0 && diff(a, b) < count) {
                    seen[b] = true;
                    stack.push_back(b);
                }
        }
        std::sort(cl.roots.begin(), cl.roots.end());
        out.push_back(cl);
    }
    for (std::size_t s = 0; s < m; ++s)
        if (!seen[s]) throw NotComputable("exponents modulo p form a cycle; use more terms or another prime");
    return out;
}

FrobeniusBasis<mpq_class> frobenius_solve(const ThetaOpQ& op, const LocalFrame& frame, std::size_t count,
                                          int depth_budget) {
    auto ind = indicial(op, frame);
    if (!ind.unresolved.empty())
        throw NotComputable("irrational exponents: indicial factor " + format_qpoly(ind.unresolved, "rho"));
    return frobenius_core(local_operator(op, frame), exponent_classes(ind), count, depth_budget);
}

FrobeniusBasis<Zp> frobenius_solve(const ThetaOpP& op, const LocalFrame& frame, std::size_t count,
                                   int depth_budget) {
    auto ind = indicial(op, frame);
    if (count >= op.one.p) throw NotComputable("truncation order must stay below p");
    if (!ind.unresolved.empty()) throw NotComputable("indicial polynomial does not split modulo p");
    return frobenius_core(local_operator(op, frame), exponent_classes(ind, count), count, depth_budget);
}

namespace {

ThetaOpP shift_theta(const ThetaOpP& r, const Zp& q) {
    // R(theta - q)
    if (q.v == 0) return r;
    std::vector<Poly<Zp>> rows(r.rows.size());
    Zp mq = -q;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (r.rows[i].empty()) continue;
        for (std::size_t t = 0; t <= i; ++t) {
            Zp c = Zp::of(detail::binom(int(i), int(t)) % long(r.one.p), r.one.p);
            for (std::size_t e = 0; e < i - t; ++e) c = c * mq;
            rows[t] = poly::add(rows[t], poly::scale(r.rows[i], c));
        }
    }
    return ThetaOpP(std::move(rows), r.one);
}

}  // namespace

std::optional<ThetaOpP> probe_right_factor(const ThetaOpP& op, const LogSolutionP& sol, int max_order,
                                           int max_degree, const GuessOptions& opt) {
    int cap = std::min(max_order, op.order() - 1);
    if (cap < opt.min_order) return std::nullopt;
    u32 p = op.one.p;
    PrimeField F(p, PrimeField::word_limit);
    std::vector<u32> c;
    for (const auto& z : sol.top()) c.push_back(z.v);
    bool nonzero = std::any_of(c.begin(), c.end(), [](u32 v) { return v != 0; });
    if (!nonzero) return std::nullopt;
    PrimeSeries s(F, std::move(c), 0, "x");
    try {
        auto rep = guess_ode(s, cap, max_degree, opt);
        return lex_normalized(shift_theta(rep.op, sol.exponent));
    } catch (const NoAnnihilatorFound&) {
        return std::nullopt;
    }
}

LogSolutionP combine(const LogSolutionP& a, const LogSolutionP& b, u32 alpha) {
    u32 p = a.exponent.p ? a.exponent.p : b.exponent.p;
    Zp d = b.exponent - a.exponent;
    std::size_t off = d.v;
    if (off >= a.count()) throw std::invalid_argument("solutions do not share an exponent class within the truncation");
    LogSolutionP out;
    out.exponent = a.exponent;
    out.depth = std::max(a.depth, b.depth);
    std::size_t cnt = std::min(a.count(), b.count() + off);
    Zp al(alpha % p, p), z(0, p);
    out.parts.assign(std::size_t(out.depth) + 1, std::vector<Zp>(cnt, z));
    for (int l = 0; l <= out.depth; ++l)
        for (std::size_t n = 0; n < cnt; ++n) {
            Zp v = z;
            if (l <= a.depth) v = a.parts[l][n];
            if (l <= b.depth && n >= off) v = v + al * b.parts[l][n - off];
            out.parts[l][n] = v;
        }
    while (out.depth > 0 &&
           std::all_of(out.parts[out.depth].begin(), out.parts[out.depth].end(), [](const Zp& x) { return x.v == 0; })) {
        out.parts.pop_back();
        --out.depth;
    }
    out.note = "a + " + std::to_string(alpha) + " b";
    return out;
}

std::optional<SweepHit> probe_sweep(const ThetaOpP& op, const LogSolutionP& a, const LogSolutionP& b, int max_order,
                                    int max_degree, const GuessOptions& opt) {
    u32 p = op.one.p;
    for (u32 alpha = 0; alpha < p; ++alpha) {
        auto hit = probe_right_factor(op, combine(a, b, alpha), max_order, max_degree, opt);
        if (hit) return SweepHit{alpha, *hit};
    }
    return std::nullopt;
}

std::vector<u32> split_roots(const Poly<mpq_class>& h, u32 p) {
    Poly<Zp> hp = reduce(h, p);
    if (poly::deg(hp) != poly::deg(h)) throw BadReduction("leading coefficient of h vanishes modulo p");
    auto r = roots_mod_p(hp, p);
    std::sort(r.begin(), r.end());
    return r;
}

AcRootResult accidental_root_factor(const ThetaOpP& op, const Poly<mpq_class>& h, const AcRootOptions& opt) {
    u32 p = op.one.p;
    auto roots = split_roots(h, p);
    if (roots.empty()) throw NoSplitRoot("h has no root modulo " + std::to_string(p));
    u32 wp = roots[0];
    if (opt.root) {
        if (!std::binary_search(roots.begin(), roots.end(), *opt.root))
            throw NoSplitRoot(std::to_string(*opt.root) + " is not a root of h modulo " + std::to_string(p));
        wp = *opt.root;
    }
    LocalFrame frame;
    frame.kind = LocalFrame::Kind::modp;
    frame.modp_center = wp;
    std::size_t count = std::size_t(budget(opt.max_order, opt.max_degree) + opt.margin);
    auto basis = frobenius_solve(op, frame, count, opt.depth_budget);
    // a top-log part of a log solution lies in the kernel of every right
    // factor that carries the logarithms, so try the deepest first
    std::vector<std::size_t> order(basis.solutions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return basis.solutions[a].depth > basis.solutions[b].depth;
    });
    GuessOptions gopt;
    gopt.margin = opt.margin;
    for (std::size_t idx : order) {
        auto rx = probe_right_factor(op, basis.solutions[idx], opt.max_order, opt.max_degree, gopt);
        if (!rx) continue;
        // back to w: the d/dx form in x = w - w_p carries a spurious
        // (w - w_p)^(M-K) and a constant; both go with the content
        DOp<Zp> d = to_dform(*rx);
        Zp shift = -Zp(wp, p);
        Poly<Zp> g;
        for (auto& b : d.b) {
            b = poly::taylor_shift(b, shift);
            if (!b.empty()) g = g.empty() ? poly::monic(b) : poly::gcd(g, b);
        }
        if (poly::deg(g) > 0)
            for (auto& b : d.b)
                if (!b.empty()) b = poly::divmod(b, g).first;
        ThetaOpP w_op = lex_normalized(from_dform(d));
        AcRootResult res;
        res.op = w_op;
        res.root = wp;
        res.M = w_op.order();
        res.K = poly::multiplicity(w_op.head(), reduce(h, p));
        return res;
    }
    throw NoAnnihilator("no right factor of order <= " + std::to_string(opt.max_order) + " found at root " +
                        std::to_string(wp));
}

namespace {

template <class T, class Fmt>
std::string write_logsol_impl(const LogSolutionT<T>& s, const std::string& exponent, const std::string& prime,
                              Fmt fmt) {
    std::ostringstream out;
    out << "logsol exponent=" << exponent << " depth=" << s.depth << " count=" << s.count() << " prime=" << prime
        << "\n";
    if (!s.note.empty()) out << "# " << s.note << "\n";
    for (int l = 0; l <= s.depth; ++l) {
        out << "log " << l << "\n";
        for (const auto& c : s.parts[l]) out << fmt(c) << "\n";
    }
    return out.str();
}

}  // namespace

std::string write_logsol(const LogSolution& s) {
    return write_logsol_impl(s, s.exponent.get_str(), "exact", [](const mpq_class& c) { return c.get_str(); });
}

std::string write_logsol(const LogSolutionP& s) {
    return write_logsol_impl(s, std::to_string(s.exponent.v), std::to_string(s.exponent.p),
                             [](const Zp& c) { return std::to_string(c.v); });
}

std::vector<LogSolText> read_logsols(std::istream& in) {
    std::vector<LogSolText> out;
    std::string line;
    std::string note;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            note = line.substr(line.size() > 1 ? 2 : 1);
            continue;
        }
        auto kv = parse_header(line, "logsol");
        for (const char* key : {"exponent", "depth", "count", "prime"})
            if (!kv.count(key)) throw FormatError(std::string("missing header field ") + key);
        LogSolText t;
        t.prime = kv["prime"] == "exact" ? 0 : u32(std::stoul(kv["prime"]));
        t.sol.exponent = parse_rational(kv["exponent"]);
        t.sol.depth = std::stoi(kv["depth"]);
        long count = std::stol(kv["count"]);
        if (t.sol.depth < 0 || count < 0) throw FormatError("negative depth or count");
        for (int l = 0; l <= t.sol.depth; ++l) {
            std::string word;
            int lv;
            while (std::getline(in, line)) {
                if (!line.empty() && line[0] == '#') {
                    note = line.substr(line.size() > 1 ? 2 : 1);
                    continue;
                }
                if (!line.empty()) break;
            }
            std::istringstream hdr(line);
            if (!(hdr >> word >> lv) || word != "log" || lv != l)
                throw FormatError("expected 'log " + std::to_string(l) + "', got: " + line);
            std::vector<mpq_class> part;
            for (long n = 0; n < count; ++n) {
                std::string tok;
                if (!(in >> tok)) throw FormatError("log part truncated");
                part.push_back(parse_rational(tok));
            }
            std::getline(in, line);
            t.sol.parts.push_back(std::move(part));
        }
        t.sol.note = note;
        note.clear();
        out.push_back(std::move(t));
    }
    if (out.empty()) throw FormatError("no logsol record");
    return out;
}

std::vector<LogSolText> read_logsols_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return read_logsols(in);
}

LogSolutionP to_prime_logsol(const LogSolText& t, u32 p) {
    if (t.prime && t.prime != p) throw FieldMismatch("solution is modulo " + std::to_string(t.prime));
    PrimeField F(p, PrimeField::word_limit);
    LogSolutionP s;
    s.exponent = Zp(F.from_mpq(t.sol.exponent), p);
    s.depth = t.sol.depth;
    s.note = t.sol.note;
    for (const auto& part : t.sol.parts) {
        std::vector<Zp> v;
        for (const auto& c : part) v.push_back(Zp(F.from_mpq(c), p));
        s.parts.push_back(std::move(v));
    }
    return s;
}

}  // namespace odeforge
