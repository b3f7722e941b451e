#include "odeforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

#include <openssl/evp.h>
#include "tomlplusplus/toml.hpp"

#include "odeforge/guess.hpp"
#include "odeforge/opalgebra.hpp"

namespace odeforge {

namespace fs = std::filesystem;

// ---- configuration -------------------------------------------------------

namespace {

long need_int(const toml::node& n, const std::string& key) {
    auto v = n.value<int64_t>();
    if (!v) throw ConfigError(key + " must be an integer");
    return long(*v);
}

std::string need_str(const toml::node& n, const std::string& key) {
    auto v = n.value<std::string>();
    if (!v) throw ConfigError(key + " must be a string");
    return *v;
}

bool need_bool(const toml::node& n, const std::string& key) {
    auto v = n.value<bool>();
    if (!v) throw ConfigError(key + " must be true or false");
    return *v;
}

const toml::array& need_array(const toml::node& n, const std::string& key) {
    auto a = n.as_array();
    if (!a) throw ConfigError(key + " must be an array");
    return *a;
}

std::vector<u32> prime_list(const toml::node& n, const std::string& key) {
    std::vector<u32> out;
    for (const auto& el : need_array(n, key)) {
        long v = need_int(el, key);
        if (v < 3 || v >= long(PrimeField::word_limit) || !is_prime(u64(v)))
            throw ConfigError(key + ": " + std::to_string(v) + " is not an odd prime below 2^31");
        out.push_back(u32(v));
    }
    return out;
}

std::vector<std::string> string_list(const toml::node& n, const std::string& key) {
    std::vector<std::string> out;
    for (const auto& el : need_array(n, key)) out.push_back(need_str(el, key));
    return out;
}

using Handler = std::function<void(const toml::node&)>;

void walk(const toml::table& t, const std::map<std::string, std::map<std::string, Handler>>& keys) {
    for (auto&& [k, v] : t) {
        std::string sec(k.str());
        auto it = keys.find(sec);
        if (it == keys.end()) throw ConfigError("unknown section [" + sec + "]");
        auto tab = v.as_table();
        if (!tab) throw ConfigError("[" + sec + "] must be a table");
        for (auto&& [k2, v2] : *tab) {
            std::string key(k2.str());
            auto h = it->second.find(key);
            if (h == it->second.end()) throw ConfigError("unknown key " + sec + "." + key);
            h->second(v2);
        }
    }
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::string& base_dir) {
    PipelineConfig c;
    c.base_dir = base_dir;
    c.source = text;
    toml::table t;
    try {
        t = toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string("config: ") + std::string(e.description()));
    }
    auto pos_int = [](long v, const std::string& key, long lo) {
        if (v < lo) throw ConfigError(key + " must be at least " + std::to_string(lo));
        return v;
    };
    std::map<std::string, std::map<std::string, Handler>> keys{
        {"pipeline",
         {{"kind", [&](auto& n) { c.kind = need_str(n, "pipeline.kind"); }},
          {"output_dir", [&](auto& n) { c.output_dir = need_str(n, "pipeline.output_dir"); }},
          {"jobs", [&](auto& n) { c.jobs = unsigned(pos_int(need_int(n, "pipeline.jobs"), "pipeline.jobs", 1)); }}}},
        {"primes",
         {{"list", [&](auto& n) { c.primes = prime_list(n, "primes.list"); }},
          {"count", [&](auto& n) { c.prime_count = std::size_t(pos_int(need_int(n, "primes.count"), "primes.count", 1)); }},
          {"bound",
           [&](auto& n) {
               long b = pos_int(need_int(n, "primes.bound"), "primes.bound", 5);
               if (b > long(PrimeField::word_limit)) throw ConfigError("primes.bound must not exceed 2^31");
               c.prime_bound = u32(b);
           }}}},
        {"budget",
         {{"max_order", [&](auto& n) { c.max_order = int(pos_int(need_int(n, "budget.max_order"), "budget.max_order", 1)); }},
          {"max_degree", [&](auto& n) { c.max_degree = int(pos_int(need_int(n, "budget.max_degree"), "budget.max_degree", 0)); }},
          {"margin", [&](auto& n) { c.margin = int(pos_int(need_int(n, "budget.margin"), "budget.margin", 0)); }},
          {"extend_to", [&](auto& n) { c.extend_to = pos_int(need_int(n, "budget.extend_to"), "budget.extend_to", 0); }},
          {"reguess_degree",
           [&](auto& n) { c.reguess_degree = int(pos_int(need_int(n, "budget.reguess_degree"), "budget.reguess_degree", 0)); }},
          {"drop", [&](auto& n) { c.drop = int(pos_int(need_int(n, "budget.drop"), "budget.drop", 0)); }},
          {"horizon", [&](auto& n) { c.budget_horizon = pos_int(need_int(n, "budget.horizon"), "budget.horizon", 0); }}}},
        {"input",
         {{"series", [&](auto& n) { c.series_files = string_list(n, "input.series"); }},
          {"operator", [&](auto& n) { c.operator_file = need_str(n, "input.operator"); }}}},
        {"planted",
         {{"operator", [&](auto& n) { c.planted_operator = need_str(n, "planted.operator"); }},
          {"seed",
           [&](auto& n) {
               for (const auto& el : need_array(n, "planted.seed")) {
                   if (auto i = el.template value<int64_t>()) c.planted_seed.emplace_back(long(*i));
                   else c.planted_seed.push_back(parse_rational(need_str(el, "planted.seed")));
               }
           }},
          {"terms", [&](auto& n) { c.planted_terms = pos_int(need_int(n, "planted.terms"), "planted.terms", 1); }}}},
        {"verify",
         {{"pcurv_primes", [&](auto& n) { c.pcurv_primes = prime_list(n, "verify.pcurv_primes"); }},
          {"factors", [&](auto& n) { c.factor_files = string_list(n, "verify.factors"); }},
          {"require_rational_exponents",
           [&](auto& n) { c.require_rational_exponents = need_bool(n, "verify.require_rational_exponents"); }},
          {"require_nilpotent", [&](auto& n) { c.require_nilpotent = need_bool(n, "verify.require_nilpotent"); }}}},
        {"factor",
         {{"prime",
           [&](auto& n) {
               auto v = prime_list(toml::array{need_int(n, "factor.prime")}, "factor.prime");
               c.factor_prime = v[0];
           }},
          {"lift_primes", [&](auto& n) { c.lift_primes = std::size_t(pos_int(need_int(n, "factor.lift_primes"), "factor.lift_primes", 1)); }},
          {"max_order", [&](auto& n) { c.factor_max_order = int(pos_int(need_int(n, "factor.max_order"), "factor.max_order", 1)); }},
          {"max_degree", [&](auto& n) { c.factor_max_degree = int(pos_int(need_int(n, "factor.max_degree"), "factor.max_degree", 0)); }},
          {"depth_budget", [&](auto& n) { c.depth_budget = int(pos_int(need_int(n, "factor.depth_budget"), "factor.depth_budget", 0)); }},
          {"sweep", [&](auto& n) { c.sweep = need_bool(n, "factor.sweep"); }},
          {"tree", [&](auto& n) { c.tree = need_bool(n, "factor.tree"); }},
          {"sweep_prime",
           [&](auto& n) { c.sweep_prime = prime_list(toml::array{need_int(n, "factor.sweep_prime")}, "factor.sweep_prime")[0]; }}}},
        {"precision", {{"digits", [&](auto& n) { c.digits = unsigned(pos_int(need_int(n, "precision.digits"), "precision.digits", 10)); }}}},
    };
    walk(t, keys);

    if (c.kind.empty()) c.kind = c.operator_file.empty() ? "reconstruct" : "factor";
    if (c.kind != "reconstruct" && c.kind != "factor") throw ConfigError("pipeline.kind must be reconstruct or factor");
    if (c.kind == "reconstruct") {
        bool files = !c.series_files.empty(), planted = !c.planted_operator.empty();
        if (files == planted) throw ConfigError("reconstruct needs exactly one of input.series or [planted]");
        if (planted && (c.planted_seed.empty() || c.planted_terms <= 0))
            throw ConfigError("[planted] needs seed and terms");
    } else if (c.operator_file.empty()) {
        throw ConfigError("factor needs input.operator");
    }
    if (c.output_dir.empty()) throw ConfigError("pipeline.output_dir is empty");
    return c;
}

PipelineConfig load_config(const std::string& path) {
    fs::path p(path);
    std::string base = p.has_parent_path() ? p.parent_path().string() : ".";
    return parse_config(read_file(path), base);
}

std::vector<u32> prime_pool(const PipelineConfig& cfg) {
    if (!cfg.primes.empty()) return cfg.primes;
    return default_primes(cfg.prime_count, cfg.prime_bound);
}

std::string resolve(const PipelineConfig& cfg, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(cfg.base_dir) / p).lexically_normal().string();
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream o;
    for (unsigned i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return o.str();
}

// ---- manifests -----------------------------------------------------------

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string Manifest::str() const {
    std::ostringstream o;
    o << "[run]\n";
    o << "kind = " << quoted(kind) << "\n";
    o << "config_sha256 = " << quoted(config_sha256) << "\n";
    auto section = [&](const char* name, const std::map<std::string, std::string>& m) {
        o << "\n[" << name << "]\n";
        for (const auto& [k, v] : m) o << quoted(k) << " = " << quoted(v) << "\n";
    };
    section("inputs", inputs);
    section("artifacts", artifacts);
    section("results", results);
    return o.str();
}

Manifest Manifest::parse(const std::string& text) {
    Manifest m;
    toml::table t;
    try {
        t = toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw FormatError(std::string("manifest: ") + std::string(e.description()));
    }
    m.kind = t["run"]["kind"].value_or(std::string());
    m.config_sha256 = t["run"]["config_sha256"].value_or(std::string());
    auto grab = [&](const char* name, std::map<std::string, std::string>& out) {
        if (auto tab = t[name].as_table())
            for (auto&& [k, v] : *tab) out[std::string(k.str())] = v.value_or(std::string());
    };
    grab("inputs", m.inputs);
    grab("artifacts", m.artifacts);
    grab("results", m.results);
    if (m.kind.empty()) throw FormatError("manifest has no run.kind");
    return m;
}

// ---- lifting -------------------------------------------------------------

namespace {

struct Shape {
    int order, degree;
    long pivot;  // flat index of the first nonzero coefficient
    bool operator<(const Shape& o) const {
        return std::tie(order, degree, pivot) < std::tie(o.order, o.degree, o.pivot);
    }
    bool operator==(const Shape& o) const { return order == o.order && degree == o.degree && pivot == o.pivot; }
};

Shape shape_of(const ThetaOpP& op) {
    int D = op.degree();
    for (int i = 0; i <= op.order(); ++i)
        for (int j = 0; j <= D; ++j)
            if (!op.coeff(i, j).is_zero()) return {op.order(), D, long(i) * (D + 1) + j};
    return {op.order(), D, -1};
}

}  // namespace

ThetaOpQ lift_operator(const std::vector<ThetaOpP>& ops0, int drop, LiftFailure* failure) {
    if (ops0.empty()) throw InsufficientSamples("no operators to lift");
    std::vector<ThetaOpP> ops;
    for (const auto& o : ops0) ops.push_back(lex_normalized(o));
    // keep the most common shape; ties go to the smallest shape
    std::map<Shape, std::size_t> votes;
    for (const auto& o : ops) ++votes[shape_of(o)];
    Shape best = votes.begin()->first;
    for (const auto& [s, n] : votes)
        if (n > votes[best]) best = s;
    std::vector<ThetaOpP> kept;
    for (const auto& o : ops)
        if (shape_of(o) == best) kept.push_back(o);
    int M = best.order, D = best.degree;
    std::vector<Poly<mpq_class>> rows(std::size_t(M) + 1, Poly<mpq_class>(std::size_t(D) + 1, mpq_class(0)));
    LiftFailure fail;
    fail.total = std::size_t(M + 1) * std::size_t(D + 1);
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= D; ++j) {
            ResidueSet rs;
            for (const auto& o : kept) rs.push_back({o.one.p, o.coeff(i, j).v});
            long flat = long(i) * (D + 1) + j;
            try {
                mpq_class q = rational_lift(rs);
                // stability: the value must survive dropping the first or the last `drop` primes
                if (drop > 0) {
                    if (rs.size() <= std::size_t(drop)) throw NoRationalFound("too few primes for the stability check");
                    ResidueSet head(rs.begin(), rs.end() - drop), tail(rs.begin() + drop, rs.end());
                    if (rational_lift(head) != q || rational_lift(tail) != q)
                        throw NoRationalFound("lift changes when primes are dropped");
                }
                rows[std::size_t(i)][std::size_t(j)] = q;
                if (q != 0) fail.lifted.emplace_back(flat, q);
            } catch (const NoRationalFound&) {
                ++fail.failed;
            }
        }
    if (failure) *failure = fail;
    if (fail.failed)
        throw NoConsistentK(std::to_string(fail.failed) + " of " + std::to_string(fail.total) +
                            " coefficients have no stable lift over " + std::to_string(kept.size()) + " primes");
    return primitive(ThetaOpQ(std::move(rows), mpq_class(1)));
}

bool annihilates(const ThetaOpQ& op, const std::vector<mpq_class>& s) {
    for (const auto& v : apply(op, s))
        if (v != 0) return false;
    return true;
}

// ---- reports -------------------------------------------------------------

std::string PipelineReport::text() const {
    std::ostringstream o;
    for (const auto& l : log) o << "# " << l << "\n";
    for (const auto& c : checks)
        o << (c.ok ? "PASS " : (c.required ? "FAIL " : "WARN ")) << c.name << (c.detail.empty() ? "" : ": ") << c.detail
          << "\n";
    if (!advice.empty()) o << "advice: " << advice << "\n";
    o << "exit " << exit_code << "\n";
    return o.str();
}

std::string FactorReport::text() const {
    std::ostringstream o;
    for (const auto& l : log) o << "# " << l << "\n";
    for (const auto& f : factors) {
        o << "factor at " << f.frame << " from " << f.solution << ": order " << f.order << ", degree " << f.degree
          << (f.exact ? ", exact" : ", mod " + std::to_string(f.modp.one.p)) << "\n";
        o << (f.exact ? write_op(*f.exact) : write_op(f.modp));
    }
    for (const auto& e : exclusions) o << "excluded " << e.frame << " " << e.solution << ": " << e.reason << "\n";
    for (const auto& u : undecided)
        o << "undecided " << u.frame << ": dimension " << u.dimension << ", free coefficients " << u.free_coefficients
          << "\n";
    if (factors.empty() && undecided.empty())
        o << "no factors; every probe solution is excluded\n";
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const auto& n = tree[i];
        o << "node " << i << " parent=" << n.parent << " role=" << n.role << " order=" << n.op.order()
          << " degree=" << n.op.degree() << ": " << n.status << "\n";
    }
    o << "exit " << exit_code << "\n";
    return o.str();
}

// ---- reconstruction ------------------------------------------------------

namespace {

struct Inputs {
    std::vector<PrimeSeries> series;
    std::map<std::string, std::string> hashes;  // path as given -> sha256
    std::vector<std::string> log;
};

Inputs gather_inputs(const PipelineConfig& cfg) {
    Inputs in;
    if (!cfg.series_files.empty()) {
        for (const auto& f : cfg.series_files) {
            std::string path = resolve(cfg, f);
            std::string text = read_file(path);
            in.hashes[f] = sha256_hex(text);
            std::istringstream is(text);
            auto st = read_series(is);
            if (st.prime == 0) throw FormatError(f + ": reconstruction needs series modulo a prime");
            in.series.push_back(to_prime_series(st));
        }
        return in;
    }
    std::string path = resolve(cfg, cfg.planted_operator);
    std::string text = read_file(path);
    in.hashes[cfg.planted_operator] = sha256_hex(text);
    std::istringstream is(text);
    auto ot = read_op(is);
    if (ot.prime != 0) throw FormatError("planted operator must be exact");
    for (u32 p : prime_pool(cfg)) {
        try {
            PrimeField F(p, PrimeField::word_limit);
            auto opp = reduce(ot.op, p);
            if (opp.order() != ot.op.order()) throw BadReduction("head vanishes");
            std::vector<u32> seed;
            for (const auto& q : cfg.planted_seed) seed.push_back(F.from_mpq(q));
            in.series.push_back(extend_series(opp, PrimeSeries(F, seed), std::nullopt, cfg.planted_terms));
        } catch (const Error& e) {
            in.log.push_back("prime " + std::to_string(p) + " skipped while planting: " + e.what());
        }
    }
    return in;
}

std::vector<PrimeJob> run_prime_jobs(const PipelineConfig& cfg, const std::vector<PrimeSeries>& series) {
    std::vector<PrimeJob> jobs(series.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k; (k = next++) < series.size();) {
            PrimeJob& job = jobs[k];
            const auto& s = series[k];
            job.prime = s.field.p();
            try {
                GuessOptions g;
                g.margin = cfg.margin;
                auto first = guess_ode(s, cfg.max_order, cfg.max_degree, g);
                ThetaOpP op = first.op;
                job.status = "guessed order " + std::to_string(op.order()) + " degree " + std::to_string(op.degree());
                if (cfg.extend_to > long(s.size())) {
                    auto longer = extend_series(op, s, std::nullopt, cfg.extend_to);
                    GuessOptions g2 = g;
                    int deg = cfg.reguess_degree ? cfg.reguess_degree : cfg.max_degree;
                    auto second = guess_ode(longer, op.order(), deg, g2);
                    op = second.op;
                    job.status += "; re-guessed order " + std::to_string(op.order()) + " degree " +
                                  std::to_string(op.degree()) + " from " + std::to_string(longer.size()) + " terms";
                }
                job.order = op.order();
                job.degree = op.degree();
                job.op = lex_normalized(op);
            } catch (const Error& e) {
                job.status = std::string("failed: ") + e.what();
            }
        }
    };
    unsigned width = std::max(1u, std::min<unsigned>(cfg.jobs, unsigned(series.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < width; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return jobs;
}

void check_indicial(const ThetaOpQ& op, bool required, std::vector<CheckLine>& out) {
    std::vector<LocalFrame> frames(1);
    Poly<mpq_class> head = op.head();
    for (auto& [r, mult] : rational_roots(head)) {
        (void)mult;
        if (r == 0) continue;
        LocalFrame f;
        f.center = r;
        frames.push_back(f);
    }
    for (const auto& f : frames) {
        CheckLine c{"indicial exponents rational at " + f.label(), true, required, ""};
        try {
            auto ind = indicial(op, f);
            if (!ind.unresolved.empty()) {
                c.ok = false;
                c.detail = "irreducible factor " + format_qpoly(ind.unresolved, "rho");
            } else {
                for (auto& [e, m] : ind.exponents) c.detail += e.get_str() + (m > 1 ? "^" + std::to_string(m) : "") + " ";
            }
        } catch (const Error& e) {
            c.ok = false;
            c.detail = e.what();
        }
        out.push_back(c);
    }
}

void check_pcurv(const ThetaOpQ& op, const std::vector<u32>& primes, bool required, std::vector<CheckLine>& out) {
    for (u32 p : primes) {
        CheckLine c{"p-curvature mod " + std::to_string(p), true, required, ""};
        try {
            auto r = p_curvature(op, p);
            c.detail = to_string(r.kind);
            c.ok = r.kind != Curvature::neither;
        } catch (const Error& e) {
            c.ok = false;
            c.detail = e.what();
        }
        out.push_back(c);
    }
}

void check_factors(const PipelineConfig& cfg, const ThetaOpQ& op, std::vector<CheckLine>& out,
                   std::map<std::string, std::string>* hashes) {
    for (const auto& f : cfg.factor_files) {
        CheckLine c{"right divisible by " + f, true, true, ""};
        try {
            std::string text = read_file(resolve(cfg, f));
            if (hashes) (*hashes)[f] = sha256_hex(text);
            std::istringstream is(text);
            auto r = read_op(is);
            if (r.prime != 0) throw FormatError("factor must be exact");
            c.ok = right_divides(r.op, op);
        } catch (const Error& e) {
            c.ok = false;
            c.detail = e.what();
        }
        out.push_back(c);
    }
}

void finish(PipelineReport& rep) {
    if (rep.exit_code == 1) return;
    for (const auto& c : rep.checks)
        if (c.required && !c.ok) rep.exit_code = 1;
}

}  // namespace

PipelineReport run_reconstruction_pipeline(const PipelineConfig& cfg) {
    PipelineReport rep;
    fs::path out = resolve(cfg, cfg.output_dir);
    fs::create_directories(out / "primes");
    Manifest man;
    man.kind = "reconstruct";
    man.config_sha256 = sha256_hex(cfg.source);
    std::map<std::string, std::string> files;  // relative path -> content

    auto emit = [&]() {
        rep.log.insert(rep.log.begin(), "reconstruct: " + std::to_string(man.inputs.size()) + " input file(s)");
        files["report.txt"] = rep.text();
        files["config.toml"] = cfg.source;
        for (const auto& [name, content] : files) {
            write_file((out / name).string(), content);
            man.artifacts[name] = sha256_hex(content);
        }
        man.results["exit_code"] = std::to_string(rep.exit_code);
        man.results["base_dir"] = fs::absolute(cfg.base_dir).lexically_normal().string();
        if (rep.op) {
            man.results["order"] = std::to_string(rep.op->order());
            man.results["degree"] = std::to_string(rep.op->degree());
        }
        write_file((out / "manifest.toml").string(), man.str());
    };

    Inputs in;
    try {
        in = gather_inputs(cfg);
    } catch (const Error& e) {
        rep.exit_code = 1;
        rep.log.push_back(std::string("inputs: ") + e.what());
        emit();
        return rep;
    }
    man.inputs = in.hashes;
    rep.log.insert(rep.log.end(), in.log.begin(), in.log.end());

    auto jobs = run_prime_jobs(cfg, in.series);
    std::vector<ThetaOpP> good;
    for (const auto& j : jobs) {
        rep.log.push_back("prime " + std::to_string(j.prime) + ": " + j.status);
        if (j.op) {
            good.push_back(*j.op);
            files["primes/op_" + std::to_string(j.prime) + ".txt"] = write_op(*j.op);
        }
    }
    if (good.empty()) {
        rep.exit_code = 1;
        rep.log.push_back("guess: no prime produced an operator");
        emit();
        return rep;
    }

    LiftFailure fail;
    try {
        rep.op = lift_operator(good, cfg.drop, &fail);
    } catch (const NoConsistentK& e) {
        rep.exit_code = 1;
        rep.log.push_back(std::string("lift: NoConsistentK: ") + e.what());
        long horizon = cfg.budget_horizon ? cfg.budget_horizon : long(fail.total);
        try {
            auto fit = estimate_prime_budget(fail.lifted, horizon);
            rep.advice = "estimate_prime_budget predicts about " + std::to_string(fit.predicted_max_primes) +
                         " primes (have " + std::to_string(good.size()) + ")";
            files["budget.svg"] = budget_svg(fit, horizon);
        } catch (const Error& e2) {
            rep.advice = std::string("add primes; budget estimate unavailable: ") + e2.what();
        }
        emit();
        return rep;
    } catch (const Error& e) {
        rep.exit_code = 1;
        rep.log.push_back(std::string("lift: ") + e.what());
        emit();
        return rep;
    }
    files["op.txt"] = write_op(*rep.op);

    // verification battery
    {
        CheckLine c{"annihilates every input series", true, true, ""};
        std::size_t bad = 0;
        for (const auto& s : in.series) {
            u32 p = s.field.p();
            try {
                auto r = residual(reduce(*rep.op, p), s);
                if (std::any_of(r.begin(), r.end(), [](u32 v) { return v != 0; })) ++bad;
            } catch (const Error&) {
                ++bad;
            }
        }
        c.ok = bad == 0;
        c.detail = std::to_string(in.series.size() - bad) + "/" + std::to_string(in.series.size()) + " primes";
        rep.checks.push_back(c);
    }
    check_indicial(*rep.op, cfg.require_rational_exponents, rep.checks);
    check_pcurv(*rep.op, cfg.pcurv_primes, cfg.require_nilpotent, rep.checks);
    check_factors(cfg, *rep.op, rep.checks, &man.inputs);
    if (!cfg.planted_operator.empty()) {
        auto ot = read_op_file(resolve(cfg, cfg.planted_operator));
        bool same = primitive(ot.op) == *rep.op;
        bool divides = same || right_divides(*rep.op, ot.op);
        rep.checks.push_back({"matches planted operator", same, false,
                              same ? "" : (divides ? "recovered a right factor of the plant" : "differs from the plant")});
    }
    finish(rep);
    std::ostringstream vl;
    for (const auto& c : rep.checks) vl << (c.ok ? "ok   " : "fail ") << c.name << " " << c.detail << "\n";
    files["verify.log"] = vl.str();
    emit();
    return rep;
}

// ---- factor probing ------------------------------------------------------

namespace {

// Operator in x = w - c (theta_x form) back to w, content removed.
ThetaOpP back_to_w(const ThetaOpP& rx, const Zp& c) {
    if (c.v == 0) return lex_normalized(rx);
    DOp<Zp> d = to_dform(rx);
    Zp shift = -c;
    Poly<Zp> g;
    for (auto& b : d.b) {
        b = poly::taylor_shift(b, shift);
        if (!b.empty()) g = g.empty() ? poly::monic(b) : poly::gcd(g, b);
    }
    if (poly::deg(g) > 0)
        for (auto& b : d.b)
            if (!b.empty()) b = poly::divmod(b, g).first;
    return lex_normalized(from_dform(d));
}

std::string sol_label(const LogSolutionP& s, std::size_t idx) {
    return "solution " + std::to_string(idx) + " (x^" + std::to_string(s.exponent.v) +
           (s.depth ? " ln^" + std::to_string(s.depth) : "") + ")";
}

struct FrameProbe {
    LocalFrame frame;
    std::optional<mpq_class> exact_center;
};

std::optional<ThetaOpP> probe_one(const ThetaOpP& opp, const LocalFrame& f, std::size_t idx, const PipelineConfig& cfg,
                                  std::size_t count) {
    auto basis = frobenius_solve(opp, f, count, cfg.depth_budget);
    if (idx >= basis.solutions.size()) return std::nullopt;
    GuessOptions g;
    g.margin = cfg.margin;
    int mo = std::min(cfg.factor_max_order, opp.order() - 1);
    auto rx = probe_right_factor(opp, basis.solutions[idx], mo, cfg.factor_max_degree, g);
    if (!rx) return std::nullopt;
    u32 p = opp.one.p;
    Zp c(0, p);
    if (f.kind == LocalFrame::Kind::point) c = Zp(PrimeField(p, PrimeField::word_limit).from_mpq(f.center), p);
    if (f.kind == LocalFrame::Kind::modp) c = Zp(f.modp_center % p, p);
    return back_to_w(*rx, c);
}

}  // namespace

namespace {
void grow_tree(FactorReport& rep, const ThetaOpQ& op, const PipelineConfig& cfg);
}

FactorReport probe_factors(const OpText& input, const PipelineConfig& cfg) {
    FactorReport rep;
    bool exact = input.prime == 0;
    std::vector<u32> pool = prime_pool(cfg);
    u32 p = exact ? (cfg.factor_prime ? cfg.factor_prime : pool.front()) : input.prime;
    ThetaOpP opp = exact ? reduce(input.op, p) : to_prime_op(input, p);
    int M = opp.order();
    if (M < 2) {
        rep.log.push_back("order " + std::to_string(M) + " has no proper right factors");
        return rep;
    }
    std::size_t count = std::size_t(budget(std::min(cfg.factor_max_order, M - 1), cfg.factor_max_degree) + cfg.margin);
    if (count >= p) throw ConfigError("probe needs " + std::to_string(count) + " terms, which is not below p");
    rep.log.push_back("probing modulo " + std::to_string(p) + " with " + std::to_string(count) + " terms");

    std::vector<FrameProbe> frames;
    frames.push_back({LocalFrame{}, mpq_class(0)});
    Poly<mpq_class> rest;
    if (exact) {
        for (auto& [r, m] : rational_roots(input.op.head(), &rest)) {
            (void)m;
            if (r == 0) continue;
            LocalFrame f;
            f.center = r;
            frames.push_back({f, r});
        }
    } else {
        for (u32 r : roots_mod_p(opp.head(), p)) {
            if (r == 0) continue;
            LocalFrame f;
            f.kind = LocalFrame::Kind::modp;
            f.modp_center = r;
            frames.push_back({f, std::nullopt});
        }
    }

    auto known = [&](const ThetaOpP& o) {
        for (const auto& f : rep.factors)
            if (f.modp.one.p == o.one.p && f.modp == o) return true;
        return false;
    };

    for (const auto& fp : frames) {
        std::string label = fp.frame.label();
        FrobeniusBasis<Zp> basis;
        try {
            basis = frobenius_solve(opp, fp.frame, count, cfg.depth_budget);
        } catch (const Error& e) {
            rep.log.push_back(label + ": " + e.what());
            rep.undecided.push_back({label, std::size_t(M), std::size_t(M) - 1});
            continue;
        }
        std::vector<std::size_t> order(basis.solutions.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return basis.solutions[a].depth > basis.solutions[b].depth;
        });
        bool any = false;
        for (std::size_t idx : order) {
            std::string sl = sol_label(basis.solutions[idx], idx);
            std::optional<ThetaOpP> found;
            try {
                found = probe_one(opp, fp.frame, idx, cfg, count);
            } catch (const Error& e) {
                rep.log.push_back(label + " " + sl + ": " + e.what());
            }
            if (!found) {
                rep.exclusions.push_back({label, sl,
                                          "no right factor of order <= " +
                                              std::to_string(std::min(cfg.factor_max_order, M - 1)) +
                                              " and degree <= " + std::to_string(cfg.factor_max_degree) +
                                              " annihilates it"});
                continue;
            }
            any = true;
            if (known(*found)) continue;
            FactorFinding ff{label, sl, found->order(), found->degree(), std::nullopt, *found};
            if (exact) {
                std::vector<ThetaOpP> mods{*found};
                for (u32 q : pool) {
                    if (mods.size() >= cfg.lift_primes + std::size_t(cfg.drop)) break;
                    if (q == p) continue;
                    try {
                        auto oq = reduce(input.op, q);
                        if (oq.order() != M) continue;
                        if (auto r = probe_one(oq, fp.frame, idx, cfg, count)) mods.push_back(*r);
                    } catch (const Error&) {
                    }
                }
                try {
                    auto lifted = lift_operator(mods, cfg.drop);
                    if (right_divides(lifted, input.op)) ff.exact = lifted;
                    else rep.log.push_back(label + " " + sl + ": lifted factor does not divide exactly");
                } catch (const Error& e) {
                    rep.log.push_back(label + " " + sl + ": exact lift failed: " + e.what());
                }
            }
            rep.factors.push_back(ff);
        }
        // combinations of the two deepest solutions
        if (!any && basis.solutions.size() >= 2 && fp.frame.kind == LocalFrame::Kind::point && fp.frame.center == 0) {
            if (!cfg.sweep) {
                rep.undecided.push_back({label, basis.solutions.size(), 1});
                continue;
            }
            u32 sp = cfg.sweep_prime;
            try {
                ThetaOpP ops = exact ? reduce(input.op, sp) : to_prime_op(input, sp);
                std::size_t sc = std::min<std::size_t>(count, sp - 1);
                auto sb = frobenius_solve(ops, fp.frame, sc, cfg.depth_budget);
                GuessOptions g;
                g.margin = cfg.margin;
                int mo = std::min(cfg.factor_max_order, M - 1);
                auto hit = probe_sweep(ops, sb.solutions[order[0]], sb.solutions[order[1]], mo, cfg.factor_max_degree, g);
                if (hit) {
                    ThetaOpP w = lex_normalized(hit->op);
                    rep.factors.push_back({label, "sweep alpha=" + std::to_string(hit->alpha) + " mod " + std::to_string(sp),
                                           w.order(), w.degree(), std::nullopt, w});
                } else {
                    rep.exclusions.push_back({label, "a + alpha b over F_" + std::to_string(sp),
                                              "no alpha gives a right factor"});
                }
            } catch (const Error& e) {
                rep.log.push_back(label + " sweep: " + e.what());
                rep.undecided.push_back({label, basis.solutions.size(), 1});
            }
        }
    }

    // irrational head factors via accidental roots modulo split primes
    if (exact && poly::deg(rest) >= 1) {
        Poly<mpq_class> g = poly::gcd(rest, poly::deriv(rest));
        Poly<mpq_class> h = poly::deg(g) > 0 ? poly::divmod(rest, g).first : rest;
        std::string label = "root:" + format_qpoly(h);
        AcRootOptions ao;
        ao.max_order = std::min(cfg.factor_max_order, M - 1);
        ao.max_degree = cfg.factor_max_degree;
        ao.margin = cfg.margin;
        ao.depth_budget = cfg.depth_budget;
        std::vector<ThetaOpP> mods;
        std::size_t tried = 0;
        for (u32 q : default_primes(400, 1u << 15)) {
            if (mods.size() >= cfg.lift_primes + std::size_t(cfg.drop)) break;
            try {
                if (split_roots(h, q).empty()) continue;
                ++tried;
                auto oq = reduce(input.op, q);
                if (oq.order() != M) continue;
                mods.push_back(accidental_root_factor(oq, h, ao).op);
            } catch (const NoAnnihilator&) {
                if (tried >= 3 && mods.empty()) break;
            } catch (const Error&) {
            }
        }
        if (mods.empty()) {
            rep.exclusions.push_back({label, "deepest solutions at a split root",
                                      "no right factor of order <= " + std::to_string(ao.max_order) + " annihilates them"});
        } else {
            FactorFinding ff{label, "accidental root", mods[0].order(), mods[0].degree(), std::nullopt, mods[0]};
            try {
                auto lifted = lift_operator(mods, cfg.drop);
                if (right_divides(lifted, input.op)) ff.exact = lifted;
                else rep.log.push_back(label + ": lifted factor does not divide exactly");
            } catch (const Error& e) {
                rep.log.push_back(label + ": exact lift failed: " + e.what());
            }
            rep.factors.push_back(ff);
        }
    }
    rep.exit_code = rep.undecided.empty() ? 0 : 2;
    if (exact && cfg.tree) grow_tree(rep, input.op, cfg);
    return rep;
}

namespace {

// Splits at the lowest-order exact right factor, then probes both parts.
void grow_tree(FactorReport& rep, const ThetaOpQ& op, const PipelineConfig& cfg) {
    PipelineConfig leaf = cfg;
    leaf.tree = false;
    rep.tree = {{primitive(op), -1, "input", ""}};
    std::function<void(std::size_t, const FactorReport&)> split = [&](std::size_t i, const FactorReport& fr) {
        ThetaOpQ node = rep.tree[i].op;
        const FactorFinding* pick = nullptr;
        for (const auto& f : fr.factors)
            if (f.exact && f.exact->order() < node.order() && f.exact->order() > 0 &&
                (!pick || f.exact->order() < pick->exact->order()))
                pick = &f;
        if (!pick) {
            rep.tree[i].status = fr.undecided.empty() ? "no right factor found" : "undecided";
            if (!fr.undecided.empty()) rep.exit_code = 2;
            return;
        }
        ThetaOpQ right = primitive(*pick->exact);
        ThetaOpQ left = primitive(right_divide(node, right).quotient);
        rep.tree[i].status = "split at " + pick->frame;
        std::size_t r = rep.tree.size();
        rep.tree.push_back({right, int(i), "right", ""});
        rep.tree.push_back({left, int(i), "left", ""});
        for (std::size_t k : {r, r + 1}) {
            if (rep.tree[k].op.order() < 2) {
                rep.tree[k].status = "order " + std::to_string(rep.tree[k].op.order());
                continue;
            }
            try {
                split(k, probe_factors(OpText{0, rep.tree[k].op}, leaf));
            } catch (const Error& e) {
                rep.tree[k].status = std::string("undecided: ") + e.what();
                rep.exit_code = 2;
            }
        }
    };
    if (op.order() < 2) {
        rep.tree[0].status = "order " + std::to_string(op.order());
        return;
    }
    split(0, rep);
}

}  // namespace

PipelineReport run_factor_probe_pipeline(const PipelineConfig& cfg) {
    PipelineReport rep;
    fs::path out = resolve(cfg, cfg.output_dir);
    fs::create_directories(out);
    Manifest man;
    man.kind = "factor";
    man.config_sha256 = sha256_hex(cfg.source);
    std::map<std::string, std::string> files;
    files["config.toml"] = cfg.source;
    try {
        std::string text = read_file(resolve(cfg, cfg.operator_file));
        man.inputs[cfg.operator_file] = sha256_hex(text);
        std::istringstream is(text);
        auto input = read_op(is);
        if (input.prime == 0) rep.op = input.op;
        auto fr = probe_factors(input, cfg);
        rep.exit_code = fr.exit_code;
        files["factors.txt"] = fr.text();
        for (std::size_t i = 0; i < fr.factors.size(); ++i) {
            const auto& f = fr.factors[i];
            files["factor_" + std::to_string(i) + ".txt"] = f.exact ? write_op(*f.exact) : write_op(f.modp);
            rep.checks.push_back({"factor " + std::to_string(i) + " at " + f.frame, true, true,
                                  f.exact ? "exact, right-divides" : "modulo " + std::to_string(f.modp.one.p)});
        }
        rep.log = fr.log;
        for (std::size_t i = 0; i < fr.tree.size(); ++i) files["tree/node_" + std::to_string(i) + ".txt"] = write_op(fr.tree[i].op);
        man.results["factors"] = std::to_string(fr.factors.size());
        man.results["tree_nodes"] = std::to_string(fr.tree.size());
        man.results["exclusions"] = std::to_string(fr.exclusions.size());
        man.results["undecided"] = std::to_string(fr.undecided.size());
    } catch (const Error& e) {
        rep.exit_code = 1;
        rep.log.push_back(e.what());
    }
    files["report.txt"] = rep.text();
    for (const auto& [name, content] : files) {
        fs::create_directories((out / name).parent_path());
        write_file((out / name).string(), content);
        man.artifacts[name] = sha256_hex(content);
    }
    man.results["exit_code"] = std::to_string(rep.exit_code);
    man.results["base_dir"] = fs::absolute(cfg.base_dir).lexically_normal().string();
    write_file((out / "manifest.toml").string(), man.str());
    return rep;
}

// ---- stateless verification ----------------------------------------------

PipelineReport verify_run(const std::string& manifest_path) {
    PipelineReport rep;
    fs::path dir = fs::path(manifest_path).has_parent_path() ? fs::path(manifest_path).parent_path() : fs::path(".");
    Manifest man = Manifest::parse(read_file(manifest_path));
    for (const auto& [name, hash] : man.artifacts) {
        CheckLine c{"artifact " + name, true, true, ""};
        try {
            c.ok = sha256_hex(read_file((dir / name).string())) == hash;
            if (!c.ok) c.detail = "hash differs";
        } catch (const Error& e) {
            c.ok = false;
            c.detail = e.what();
        }
        rep.checks.push_back(c);
    }
    if (!man.artifacts.count("config.toml")) throw FormatError("manifest lists no config.toml");
    std::string base = man.results.count("base_dir") ? man.results.at("base_dir") : dir.string();
    PipelineConfig cfg = parse_config(read_file((dir / "config.toml").string()), base);
    if (sha256_hex(cfg.source) != man.config_sha256)
        rep.checks.push_back({"config hash", false, true, "config.toml does not match the manifest"});
    for (const auto& [name, hash] : man.inputs) {
        CheckLine c{"input " + name, true, true, ""};
        try {
            c.ok = sha256_hex(read_file(resolve(cfg, name))) == hash;
            if (!c.ok) c.detail = "hash differs";
        } catch (const Error& e) {
            c.ok = false;
            c.detail = e.what();
        }
        rep.checks.push_back(c);
    }
    if (man.kind == "reconstruct" && man.artifacts.count("op.txt")) {
        auto ot = read_op_file((dir / "op.txt").string());
        rep.op = ot.op;
        auto in = gather_inputs(cfg);
        CheckLine c{"annihilates every input series", true, true, ""};
        std::size_t bad = 0;
        for (const auto& s : in.series) {
            try {
                auto r = residual(reduce(ot.op, s.field.p()), s);
                if (std::any_of(r.begin(), r.end(), [](u32 v) { return v != 0; })) ++bad;
            } catch (const Error&) {
                ++bad;
            }
        }
        c.ok = bad == 0 && !in.series.empty();
        c.detail = std::to_string(in.series.size() - bad) + "/" + std::to_string(in.series.size()) + " primes";
        rep.checks.push_back(c);
        check_indicial(ot.op, cfg.require_rational_exponents, rep.checks);
        check_pcurv(ot.op, cfg.pcurv_primes, cfg.require_nilpotent, rep.checks);
        check_factors(cfg, ot.op, rep.checks, nullptr);
    }
    if (man.kind == "factor") {
        auto input = read_op_file(resolve(cfg, cfg.operator_file));
        for (const auto& [name, hash] : man.artifacts) {
            if (name.rfind("factor_", 0) != 0) continue;
            auto f = read_op_file((dir / name).string());
            CheckLine c{"factor file " + name, true, true, ""};
            if (f.prime == 0 && input.prime == 0) {
                c.ok = right_divides(f.op, input.op);
                c.detail = c.ok ? "right-divides" : "does not right-divide";
            } else {
                c.detail = "modular factor, not re-derived";
            }
            rep.checks.push_back(c);
        }
        // every right child divides its parent
        std::map<std::size_t, ThetaOpQ> nodes;
        for (const auto& [name, hash] : man.artifacts)
            if (name.rfind("tree/node_", 0) == 0)
                nodes[std::stoul(name.substr(10))] = read_op_file((dir / name).string()).op;
        if (!nodes.empty()) {
            std::istringstream fs_in(read_file((dir / "factors.txt").string()));
            std::string line;
            while (std::getline(fs_in, line)) {
                long i = 0, parent = -1;
                char role[16] = {0};
                if (std::sscanf(line.c_str(), "node %ld parent=%ld role=%15s", &i, &parent, role) != 3) continue;
                if (std::string(role) != "right" || parent < 0) continue;
                CheckLine c{"tree node " + std::to_string(i) + " right-divides node " + std::to_string(parent), true, true, ""};
                c.ok = nodes.count(std::size_t(i)) && nodes.count(std::size_t(parent)) &&
                       right_divides(nodes[std::size_t(i)], nodes[std::size_t(parent)]);
                rep.checks.push_back(c);
            }
        }
    }
    rep.exit_code = 0;
    finish(rep);
    return rep;
}

}  // namespace odeforge
