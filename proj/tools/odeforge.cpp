#include <fstream>
#include <iostream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "odeforge/continuation.hpp"
#include "odeforge/guess.hpp"
#include "odeforge/localfrob.hpp"
#include "odeforge/opalgebra.hpp"
#include "odeforge/pipeline.hpp"
#include "odeforge/reconstruct.hpp"
#include "odeforge/textio.hpp"

using namespace odeforge;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<mpq_class> exact_series(const std::string& path, long* offset = nullptr) {
    auto s = read_series_file(path);
    if (s.prime != 0) throw FormatError(path + ": expected an exact series");
    if (offset) *offset = s.offset;
    return s.coeffs;
}

ThetaOpQ exact_op(const std::string& path) {
    auto t = read_op_file(path);
    if (t.prime != 0) throw FormatError(path + ": expected an exact operator");
    return t.op;
}

// exact operators reduce to `prime`; modular ones keep their own prime
ThetaOpP prime_op(const std::string& path, u32 prime) {
    auto t = read_op_file(path);
    if (t.prime == 0) {
        if (!prime) throw FormatError(path + " is exact; pass --prime");
        return reduce(t.op, prime);
    }
    return to_prime_op(t, t.prime);
}

// "center[@scale][,side]"
Frame parse_match_frame(const std::string& text) {
    Frame f;
    std::string s = text;
    if (auto c = s.find(','); c != std::string::npos) {
        f.side = std::stoi(s.substr(c + 1)) < 0 ? -1 : 1;
        s = s.substr(0, c);
    }
    if (auto a = s.find('@'); a != std::string::npos) {
        f.scale = parse_rational(s.substr(a + 1));
        s = s.substr(0, a);
    }
    f.center = parse_rational(s);
    return f;
}

std::vector<BigFloat> bigfloats(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::vector<BigFloat> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(BigFloat::parse(line));
    }
    return out;
}

// values file: exact rationals when every line parses as num/den
std::vector<mpq_class> rationals(const std::string& path, bool* ok) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::vector<mpq_class> out;
    std::string line;
    *ok = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find_first_of(".e@") != std::string::npos) {
            *ok = false;
            return {};
        }
        out.push_back(parse_rational(line));
    }
    return out;
}

// coeff_index  prime  residue
std::map<long, ResidueSet> read_residues(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::map<long, ResidueSet> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long idx;
        u64 p, r;
        if (!(ls >> idx >> p >> r) || r >= p) throw FormatError("bad residue line: " + line);
        out[idx].push_back({u32(p), u32(r)});
    }
    return out;
}

std::string print_report(const RadiusReport& r) {
    std::ostringstream o;
    o << "radius " << std::setprecision(12) << r.radius << "\nerror " << r.error << "\nsigns " << r.sign_pattern
      << "\nmethod " << r.method << "\nused " << r.used << "\n";
    return o.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"odeforge: linear ODE guessing, lifting, local analysis and continuation"};
    app.require_subcommand(1);
    auto status = std::make_shared<int>(0);

    // ---- guess ----
    {
        auto* c = app.add_subcommand("guess", "minimal operator annihilating a mod-p series");
        auto series = std::make_shared<std::string>();
        auto mo = std::make_shared<int>(4);
        auto md = std::make_shared<int>(6);
        auto margin = std::make_shared<int>(10);
        c->add_option("--series", *series)->required();
        c->add_option("--max-order", *mo);
        c->add_option("--max-degree", *md);
        c->add_option("--margin", *margin);
        c->callback([=] {
            auto s = to_prime_series(read_series_file(*series));
            auto r = guess_ode(s, *mo, *md, {*margin, 1});
            std::cout << write_op(r.op);
            std::cerr << "kernel " << r.kernel_dim << " unknowns " << r.unknowns << " equations " << r.equations_used
                      << "\n";
        });
    }
    {
        auto* c = app.add_subcommand("guess-inhom", "operator with a right-hand side in known bases");
        auto series = std::make_shared<std::string>();
        auto bases = std::make_shared<std::string>("elliptic");
        auto mo = std::make_shared<int>(4);
        auto md = std::make_shared<int>(6);
        auto rd = std::make_shared<int>(0);
        auto margin = std::make_shared<int>(10);
        c->add_option("--series", *series)->required();
        c->add_option("--bases", *bases, "elliptic[:kappa=K]");
        c->add_option("--max-order", *mo);
        c->add_option("--max-degree", *md);
        c->add_option("--rhs-degree", *rd);
        c->add_option("--margin", *margin);
        c->callback([=] {
            auto s = to_prime_series(read_series_file(*series));
            int kappa = 0;
            auto parts = split(*bases, ':');
            if (parts.empty() || parts[0] != "elliptic") throw ConfigError("unknown bases " + *bases);
            for (std::size_t i = 1; i < parts.size(); ++i) {
                auto kv = split(parts[i], '=');
                if (kv.size() != 2 || kv[0] != "kappa") throw ConfigError("bad basis option " + parts[i]);
                kappa = std::stoi(kv[1]);
            }
            auto rhs = elliptic_basis(s.field, s.end() > 0 ? std::size_t(s.end()) : 0, kappa, *rd);
            auto r = guess_inhom(s, *mo, *md, rhs, {*margin, 0});
            std::cout << write_op(r.op);
            for (std::size_t t = 0; t < r.rhs_polys.size(); ++t) {
                std::cout << "rhs " << rhs.bases[t].label;
                for (u32 v : r.rhs_polys[t]) std::cout << " " << v;
                std::cout << "\n";
            }
        });
    }
    {
        auto* c = app.add_subcommand("extend", "extend a series with the operator recursion");
        auto op = std::make_shared<std::string>();
        auto seed = std::make_shared<std::string>();
        auto to = std::make_shared<long>(0);
        c->add_option("--op", *op)->required();
        c->add_option("--seed", *seed)->required();
        c->add_option("--to", *to)->required();
        c->callback([=] {
            auto s = read_series_file(*seed);
            if (s.prime == 0) throw FormatError("extend works modulo a prime");
            auto ps = to_prime_series(s);
            auto L = prime_op(*op, s.prime);
            std::cout << write_series(to_text(extend_series(L, ps, std::nullopt, *to)));
        });
    }
    {
        auto* c = app.add_subcommand("budget", "number of series terms needed for a fit");
        auto args = std::make_shared<std::vector<long>>();
        c->add_option("values", *args, "M D [nb Dr]")->required()->expected(2, 4);
        c->callback([=] {
            auto& a = *args;
            if (a.size() == 3) throw ConfigError("budget takes M D or M D nb Dr");
            std::cout << budget(a[0], a[1], a.size() > 2 ? a[2] : 0, a.size() > 3 ? a[3] : 0) << "\n";
        });
    }

    // ---- reconstruct ----
    {
        auto* c = app.add_subcommand("crt", "symmetric integer lift per coefficient");
        auto in = std::make_shared<std::string>();
        c->add_option("--in", *in)->required();
        c->callback([=] {
            for (auto& [idx, rs] : read_residues(*in)) std::cout << idx << "\t" << crt_lift(rs).get_str() << "\n";
        });
    }
    {
        auto* c = app.add_subcommand("ratrec", "rational lift per coefficient");
        auto in = std::make_shared<std::string>();
        auto drop = std::make_shared<int>(0);
        c->add_option("--in", *in)->required();
        c->add_option("--drop", *drop, "require stability when this many primes are removed");
        c->callback([=] {
            bool failed = false;
            for (auto& [idx, rs] : read_residues(*in)) {
                try {
                    mpq_class q = rational_lift(rs);
                    if (*drop > 0) {
                        if (rs.size() <= std::size_t(*drop)) throw NoRationalFound("too few primes");
                        ResidueSet head(rs.begin(), rs.end() - *drop), tail(rs.begin() + *drop, rs.end());
                        if (rational_lift(head) != q || rational_lift(tail) != q)
                            throw NoRationalFound("unstable under dropping primes");
                    }
                    std::cout << idx << "\t" << q.get_str() << "\n";
                } catch (const NoRationalFound& e) {
                    std::cout << idx << "\t?\t" << e.what() << "\n";
                    failed = true;
                }
            }
            if (failed) *status = 1;
        });
    }
    {
        auto* c = app.add_subcommand("estimate-primes", "extrapolate the number of primes a lift needs");
        auto in = std::make_shared<std::string>();
        auto fit = std::make_shared<std::string>("quadratic");
        auto plot = std::make_shared<std::string>();
        auto horizon = std::make_shared<long>(0);
        auto headroom = std::make_shared<long>(0);
        c->add_option("--in", *in, "residue TSV; stable lifts feed the fit")->required();
        c->add_option("--fit", *fit)->check(CLI::IsMember({"quadratic"}));
        c->add_option("--plot", *plot);
        c->add_option("--horizon", *horizon);
        c->add_option("--headroom", *headroom);
        c->callback([=] {
            std::vector<std::pair<long, mpq_class>> partial;
            long maxidx = 0;
            for (auto& [idx, rs] : read_residues(*in)) {
                maxidx = std::max(maxidx, idx);
                try {
                    mpq_class q = rational_lift(rs);
                    if (rs.size() > 3) {
                        ResidueSet head(rs.begin(), rs.end() - 3);
                        if (rational_lift(head) != q) continue;
                    }
                    partial.emplace_back(idx, q);
                } catch (const NoRationalFound&) {
                }
            }
            long h = *horizon ? *horizon : maxidx + 1;
            auto f = estimate_prime_budget(partial, h, *headroom);
            std::cout << "fit r(n) = " << f.c0 << " + " << f.c1 << " n + " << f.c2 << " n^2\n";
            std::cout << "max " << f.fitted_max << " at n = " << f.argmax << "\n";
            std::cout << "primes " << f.predicted_max_primes << "\n";
            if (!plot->empty()) write_file(*plot, budget_svg(f, h));
        });
    }

    // ---- op ----
    {
        auto* c = app.add_subcommand("op", "operator algebra");
        c->require_subcommand(1);
        auto* mul = c->add_subcommand("mul", "composition a o b");
        auto a = std::make_shared<std::string>();
        auto b = std::make_shared<std::string>();
        mul->add_option("a", *a)->required();
        mul->add_option("b", *b)->required();
        mul->callback([=] { std::cout << write_op(multiply(exact_op(*a), exact_op(*b))); });

        auto* divr = c->add_subcommand("divr", "right division l = q r + rem");
        auto l = std::make_shared<std::string>();
        auto r = std::make_shared<std::string>();
        divr->add_option("l", *l)->required();
        divr->add_option("r", *r)->required();
        divr->callback([=] {
            auto d = right_divide(exact_op(*l), exact_op(*r));
            std::cout << "multiplier " << format_qpoly(d.multiplier) << "\n";
            std::cout << "quotient\n" << write_op(d.quotient) << "remainder\n" << write_op(d.remainder);
            if (!d.remainder.is_zero()) *status = 1;
        });

        auto* adj = c->add_subcommand("adjoint", "formal adjoint");
        auto x = std::make_shared<std::string>();
        adj->add_option("op", *x)->required();
        adj->callback([=] { std::cout << write_op(adjoint(exact_op(*x))); });

        auto* ap = c->add_subcommand("apply", "apply an exact operator to an exact series");
        auto aop = std::make_shared<std::string>();
        auto aser = std::make_shared<std::string>();
        ap->add_option("op", *aop)->required();
        ap->add_option("--series", *aser)->required();
        ap->callback([=] {
            auto out = odeforge::apply(exact_op(*aop), exact_series(*aser));
            SeriesText t;
            t.coeffs = out;
            std::cout << write_series(t);
            for (const auto& v : out)
                if (v != 0) *status = 1;
        });

        auto* pc = c->add_subcommand("pcurv", "p-curvature class");
        auto pop = std::make_shared<std::string>();
        auto primes = std::make_shared<std::vector<u32>>();
        pc->add_option("op", *pop)->required();
        pc->add_option("--prime", *primes)->delimiter(',');
        pc->callback([=] {
            auto t = read_op_file(*pop);
            std::vector<u32> ps = *primes;
            if (t.prime) ps = {t.prime};
            if (ps.empty()) throw ConfigError("pass --prime");
            for (u32 p : ps) {
                auto rep = t.prime ? p_curvature(to_prime_op(t, p)) : p_curvature(t.op, p);
                std::cout << p << "\t" << to_string(rep.kind);
                if (rep.witness_power) std::cout << "\t" << rep.witness_power;
                std::cout << "\n";
            }
        });

        auto* ar = c->add_subcommand("ann-rational", "first-order annihilator of num/den");
        auto num = std::make_shared<std::string>();
        auto den = std::make_shared<std::string>("1");
        ar->add_option("--num", *num)->required();
        ar->add_option("--den", *den);
        ar->callback([=] { std::cout << write_op(annihilator_of_rational(parse_qpoly(*num), parse_qpoly(*den))); });

        auto* bl = c->add_subcommand("blocks", "symmetric power/product test on log block schemes");
        auto schemes = std::make_shared<std::vector<std::string>>();
        auto config = std::make_shared<std::vector<int>>();
        auto mode = std::make_shared<std::string>("product");
        bl->add_option("--scheme", *schemes, "point=n1,n2,... (BLn block sizes)")->required();
        bl->add_option("--config", *config, "factor orders, or q,n for power mode")->required()->delimiter(',');
        bl->add_option("--mode", *mode)->check(CLI::IsMember({"product", "power"}));
        bl->callback([=] {
            std::vector<BlockScheme> target;
            for (const auto& s : *schemes) {
                auto eq = s.find('=');
                if (eq == std::string::npos) throw ConfigError("scheme needs point=blocks");
                std::vector<int> blocks;
                for (const auto& b : split(s.substr(eq + 1), ',')) blocks.push_back(std::stoi(b));
                target.emplace_back(s.substr(0, eq), blocks);
            }
            auto v = check_sym_decomposition(target, *config, *mode == "power" ? SymMode::power : SymMode::product);
            std::cout << v.summary() << "\n";
        });
    }

    // ---- local analysis ----
    {
        auto* c = app.add_subcommand("frobenius", "local log-solution basis");
        auto op = std::make_shared<std::string>();
        auto at = std::make_shared<std::string>("0");
        auto count = std::make_shared<std::size_t>(20);
        auto depth = std::make_shared<int>(4);
        auto prime = std::make_shared<u32>(0);
        c->add_option("--op", *op)->required();
        c->add_option("--at", *at, "0 | 1/4 | inf | modp:<w_p>");
        c->add_option("--count", *count);
        c->add_option("--depth", *depth);
        c->add_option("--prime", *prime, "work modulo this prime");
        c->callback([=] {
            auto t = read_op_file(*op);
            auto frame = parse_frame(*at);
            if (t.prime == 0 && *prime == 0 && frame.kind != LocalFrame::Kind::modp) {
                auto b = frobenius_solve(t.op, frame, *count, *depth);
                std::cout << "# indicial " << format_qpoly(b.indicial, "rho") << "\n";
                for (const auto& s : b.solutions) std::cout << write_logsol(s);
                return;
            }
            u32 p = t.prime ? t.prime : *prime;
            auto b = frobenius_solve(prime_op(*op, p), frame, *count, *depth);
            for (const auto& s : b.solutions) std::cout << write_logsol(s);
        });
    }
    {
        auto* c = app.add_subcommand("probe", "right factor annihilating a log solution");
        auto op = std::make_shared<std::string>();
        auto sol = std::make_shared<std::string>();
        auto index = std::make_shared<std::size_t>(0);
        auto mo = std::make_shared<int>(2);
        auto md = std::make_shared<int>(8);
        auto prime = std::make_shared<u32>(0);
        c->add_option("--op", *op)->required();
        c->add_option("--sol", *sol)->required();
        c->add_option("--index", *index, "which solution of the file");
        c->add_option("--max-order", *mo);
        c->add_option("--max-degree", *md);
        c->add_option("--prime", *prime);
        c->callback([=] {
            auto sols = read_logsols_file(*sol);
            if (*index >= sols.size()) throw FormatError("no solution " + std::to_string(*index));
            u32 p = sols[*index].prime ? sols[*index].prime : *prime;
            if (!p) throw ConfigError("pass --prime for an exact solution");
            auto L = prime_op(*op, p);
            auto r = probe_right_factor(L, to_prime_logsol(sols[*index], p), *mo, *md);
            if (!r) {
                std::cout << "none\n";
                *status = 2;
                return;
            }
            std::cout << write_op(*r);
        });
    }
    {
        auto* c = app.add_subcommand("acroot", "right factor at a root of h modulo split primes");
        auto op = std::make_shared<std::string>();
        auto h = std::make_shared<std::string>();
        auto primes = std::make_shared<std::vector<u32>>();
        auto mo = std::make_shared<int>(3);
        auto md = std::make_shared<int>(8);
        auto drop = std::make_shared<int>(3);
        c->add_option("--op", *op)->required();
        c->set_help_flag("--help", "Print this help message and exit");
        c->add_option("--h", *h, "polynomial in w")->required();
        c->add_option("--primes", *primes)->delimiter(',')->required();
        c->add_option("--max-order", *mo);
        c->add_option("--max-degree", *md);
        c->add_option("--drop", *drop);
        c->callback([=] {
            auto t = read_op_file(*op);
            auto hp = parse_qpoly(*h);
            AcRootOptions o;
            o.max_order = *mo;
            o.max_degree = *md;
            std::vector<ThetaOpP> found;
            for (u32 p : *primes) {
                auto roots = split_roots(hp, p);
                std::cout << "prime " << p << " roots";
                for (u32 r : roots) std::cout << " " << r;
                std::cout << "\n";
                if (roots.empty()) continue;
                try {
                    auto r = accidental_root_factor(t.prime ? to_prime_op(t, p) : reduce(t.op, p), hp, o);
                    found.push_back(r.op);
                    std::cout << write_op(r.op);
                } catch (const Error& e) {
                    std::cout << "no factor: " << e.what() << "\n";
                }
            }
            if (t.prime == 0 && found.size() > std::size_t(*drop)) {
                auto q = lift_operator(found, *drop);
                std::cout << "lifted\n" << write_op(q) << (right_divides(q, t.op) ? "right-divides\n" : "does not divide\n");
            }
        });
    }

    // ---- numerics ----
    {
        auto* c = app.add_subcommand("match", "connection matrix between two local bases");
        auto op = std::make_shared<std::string>();
        auto from = std::make_shared<std::string>("0");
        auto to = std::make_shared<std::string>();
        auto digits = std::make_shared<unsigned>(50);
        auto mid = std::make_shared<std::string>();
        c->add_option("--op", *op)->required();
        c->add_option("--from", *from, "center[@scale][,side]");
        c->add_option("--to", *to, "center[@scale][,side]")->required();
        c->add_option("--digits", *digits);
        c->add_option("--midpoint", *mid);
        c->callback([=] {
            MatchOptions o;
            if (!mid->empty()) o.midpoint = parse_rational(*mid);
            auto con = match_solutions(exact_op(*op), parse_match_frame(*from), parse_match_frame(*to), *digits, o);
            std::cout << "# midpoint " << con.midpoint.get_str() << " terms " << con.count_a << "," << con.count_b
                      << " achieved " << con.achieved_digits << " digits\n";
            for (std::size_t j = 0; j < con.matrix.size(); ++j) {
                std::cout << con.labels_a[j];
                for (const auto& v : con.matrix[j]) std::cout << "\t" << v.str();
                std::cout << "\n";
            }
        });
    }
    {
        auto* c = app.add_subcommand("continue", "continue a solution along a path of windings");
        auto op = std::make_shared<std::string>();
        auto start = std::make_shared<std::string>("0");
        auto coords = std::make_shared<std::vector<std::string>>();
        auto path = std::make_shared<std::string>();
        auto digits = std::make_shared<unsigned>(40);
        auto leg = std::make_shared<std::size_t>(0);
        auto ns = std::make_shared<std::vector<long>>();
        c->add_option("--op", *op)->required();
        c->add_option("--start", *start, "center[@scale][,side]");
        c->add_option("--coords", *coords, "coordinates in the start basis")->required()->delimiter(',');
        c->add_option("--path", *path)->required();
        c->add_option("--digits", *digits);
        c->add_option("--sweep-leg", *leg);
        c->add_option("--sweep", *ns, "windings for the sweep leg")->delimiter(',');
        c->callback([=] {
            std::vector<BigComplex> z;
            for (const auto& s : *coords) z.emplace_back(BigFloat::parse(s));
            auto L = exact_op(*op);
            auto p = parse_path(*path);
            auto f = parse_match_frame(*start);
            if (!ns->empty()) {
                std::cout << format_sweep(winding_sweep(L, f, z, p, *leg, *ns, *digits));
                return;
            }
            auto r = continue_along_path(L, f, z, p, *digits);
            std::cout << "# frame " << r.frame.label() << " achieved " << r.achieved_digits << " digits\n";
            for (std::size_t i = 0; i < r.coords.size(); ++i) std::cout << r.labels[i] << "\t" << r.coords[i].str() << "\n";
            for (const auto& s : r.singular)
                std::cout << "singular " << s.exponent.get_str() << " ln^" << s.depth << "\t" << s.amplitude.str() << "\n";
        });
    }
    {
        auto* c = app.add_subcommand("euler", "s(y/(1 - beta y)) for an exact series");
        auto series = std::make_shared<std::string>();
        auto beta = std::make_shared<std::string>("1");
        c->add_option("--series", *series)->required();
        c->add_option("--beta", *beta);
        c->callback([=] {
            SeriesText t;
            t.var = "y";
            t.coeffs = euler_transform(exact_series(*series), parse_rational(*beta));
            std::cout << write_series(t);
        });
    }
    {
        auto* c = app.add_subcommand("radius", "radius of convergence from the coefficient tail");
        auto series = std::make_shared<std::string>();
        auto window = std::make_shared<std::size_t>(0);
        c->add_option("--series", *series)->required();
        c->add_option("--window", *window);
        c->callback([=] { std::cout << print_report(radius_estimate(exact_series(*series), *window)); });
    }
    {
        auto* c = app.add_subcommand("cf-detect", "stable rational limit of a sequence");
        auto in = std::make_shared<std::string>();
        auto window = std::make_shared<std::size_t>(5);
        c->add_option("--in", *in, "one value per line: num/den or decimal[@digits]")->required();
        c->add_option("--window", *window);
        c->callback([=] {
            bool exact = false;
            auto q = rationals(*in, &exact);
            auto d = exact ? detect_rational(q, *window) : detect_rational(bigfloats(*in), *window);
            std::cout << d.value.get_str() << "\nwindow_start " << d.window_start << "\nverified " << d.verified << "\n";
        });
    }
    {
        auto* c = app.add_subcommand("amplitude", "amplitude of a power-law singularity from the tail");
        auto series = std::make_shared<std::string>();
        auto expo = std::make_shared<std::string>();
        auto ws = std::make_shared<std::string>("1");
        auto logd = std::make_shared<int>(0);
        auto corr = std::make_shared<int>(3);
        auto digits = std::make_shared<unsigned>(60);
        c->add_option("--series", *series)->required();
        c->add_option("--exponent", *expo)->required();
        c->add_option("--ws", *ws, "singular point");
        c->add_option("--log-depth", *logd)->check(CLI::Range(0, 1));
        c->add_option("--corrections", *corr);
        c->add_option("--digits", *digits);
        c->callback([=] {
            PrecisionScope ps(*digits + 20);
            AmplitudeModel m;
            m.gamma = parse_rational(*expo);
            m.log_depth = *logd;
            m.ws = BigFloat(parse_rational(*ws));
            m.corrections = *corr;
            auto f = fit_amplitude(exact_series(*series), m);
            std::cout << "amplitude " << f.amplitude.str() << "\nerror " << f.error.str() << "\nwindow_start "
                      << f.window_start << "\n";
            if (f.consistent_with_zero) std::cout << "consistent with zero\n";
        });
    }
    {
        auto* c = app.add_subcommand("optmatch", "matching point balancing two expansions");
        auto nw = std::make_shared<double>(8000);
        auto ny = std::make_shared<double>(800);
        auto r = std::make_shared<double>(0.183);
        auto mode = std::make_shared<std::string>("linear");
        c->add_option("--Nw", *nw);
        c->add_option("--Ny", *ny);
        c->add_option("--r", *r);
        c->add_option("--mode", *mode)->check(CLI::IsMember({"linear", "sqrt"}));
        c->callback([=] {
            auto o = optimize_match_point(*nw, *ny, *r, *mode == "sqrt" ? MatchMode::sqrt : MatchMode::linear);
            std::cout << std::setprecision(6) << "ym " << o.ym << "\ndigits " << o.digits << "\n";
        });
    }
    {
        auto* c = app.add_subcommand("denom-profile", "growth of coefficient denominators");
        auto series = std::make_shared<std::string>();
        auto plot = std::make_shared<std::string>();
        c->add_option("--series", *series)->required();
        c->add_option("--plot", *plot);
        c->callback([=] {
            long off = 0;
            auto s = exact_series(*series, &off);
            auto p = denom_profile(s, off);
            std::cout << "slope " << p.slope << "\nintercept " << p.intercept << "\n"
                      << (p.super_linear ? "super-linear\n" : "linear\n");
            if (!plot->empty()) write_file(*plot, denom_svg(p));
        });
    }

    // ---- pipeline ----
    {
        auto* c = app.add_subcommand("pipeline", "configured end-to-end runs");
        c->require_subcommand(1);
        auto cfg = std::make_shared<std::string>();
        auto* rec = c->add_subcommand("reconstruct", "guess, lift and verify an operator");
        rec->add_option("--config", *cfg)->required();
        rec->callback([=] {
            auto conf = load_config(*cfg);
            if (conf.kind != "reconstruct") throw ConfigError("config kind is " + conf.kind);
            auto r = run_reconstruction_pipeline(conf);
            std::cout << r.text();
            *status = r.exit_code;
        });
        auto* fac = c->add_subcommand("factor", "probe for right factors");
        fac->add_option("--config", *cfg)->required();
        fac->callback([=] {
            auto conf = load_config(*cfg);
            if (conf.kind != "factor") throw ConfigError("config kind is " + conf.kind);
            auto r = run_factor_probe_pipeline(conf);
            std::cout << read_file(resolve(conf, conf.output_dir) + "/factors.txt");
            *status = r.exit_code;
        });
        auto man = std::make_shared<std::string>();
        auto* ver = c->add_subcommand("verify", "re-check a finished run from its manifest");
        ver->add_option("--manifest", *man)->required();
        ver->callback([=] {
            auto r = verify_run(*man);
            std::cout << r.text();
            *status = r.exit_code;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return *status;
}
