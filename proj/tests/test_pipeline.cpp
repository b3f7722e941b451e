#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "odeforge/opalgebra.hpp"
#include "odeforge/pipeline.hpp"

using namespace odeforge;
namespace fs = std::filesystem;

namespace {

const ThetaOpQ gauss = theta_from_rows({{0, -1}, {0, -4}, {4, -4}});
const ThetaOpQ clausen = theta_from_rows({{0, -1}, {0, -6}, {0, -12}, {8, -8}});

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("odeforge_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string reconstruct_toml(const std::string& out, const std::string& op, std::size_t primes, int order, int degree,
                             long terms, const std::string& extra = "") {
    return "[pipeline]\nkind = \"reconstruct\"\noutput_dir = \"" + out + "\"\njobs = 3\n[primes]\ncount = " +
           std::to_string(primes) + "\n[budget]\nmax_order = " + std::to_string(order) +
           "\nmax_degree = " + std::to_string(degree) + "\n[planted]\noperator = \"" + op +
           "\"\nseed = [1]\nterms = " + std::to_string(terms) + "\n" + extra;
}

std::string factor_toml(const std::string& out, const std::string& op, const std::string& extra = "") {
    return "[pipeline]\nkind = \"factor\"\noutput_dir = \"" + out + "\"\n[input]\noperator = \"" + op +
           "\"\n[factor]\nmax_order = 2\nmax_degree = 4\n" + extra;
}

PipelineReport run_config(const TempDir& d, const std::string& name, const std::string& text) {
    write_file(d / name, text);
    auto cfg = load_config(d / name);
    return cfg.kind == "factor" ? run_factor_probe_pipeline(cfg) : run_reconstruction_pipeline(cfg);
}

bool same_up_to_sign(const ThetaOpQ& a, const ThetaOpQ& b) { return primitive(a) == primitive(b); }

ThetaOpQ big_operator() {
    auto op = theta_from_rows({{0, 3}, {1, 7}});
    op.rows[0][1] = mpq_class(mpz_class("1234567890123456789012"));
    op.rows[1][0] = mpq_class(mpz_class("9876543210987654321098"));
    return op;
}

int run_cli(const std::string& args) {
    const char* bin = std::getenv("ODEFORGE_BIN");
    REQUIRE_MESSAGE(bin, "ODEFORGE_BIN is not set");
    int st = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("configuration parsing") {
    auto c = parse_config("[planted]\noperator = \"a.op\"\nseed = [1, \"1/2\"]\nterms = 40\n[primes]\nlist = [32749, 32719]\n",
                          "/x");
    CHECK(c.kind == "reconstruct");
    CHECK(c.planted_seed == std::vector<mpq_class>{1, mpq_class(1, 2)});
    CHECK(prime_pool(c) == std::vector<u32>{32749, 32719});
    CHECK(resolve(c, "a.op") == "/x/a.op");

    CHECK(parse_config("[input]\noperator = \"p.op\"\n").kind == "factor");
    CHECK_THROWS_AS(parse_config("[planted]\noperator = \"a.op\"\nsed = [1]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[plantd]\noperator = \"a.op\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[pipeline]\nkind = \"reconstruct\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[primes]\nlist = [32748]\n[input]\noperator = \"p.op\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[budget]\nmax_order = \"three\"\n[input]\noperator = \"p.op\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("not toml = = 1"), ConfigError);
}

TEST_CASE("manifest text") {
    Manifest m;
    m.kind = "reconstruct";
    m.config_sha256 = sha256_hex("");
    m.inputs["b.txt"] = sha256_hex("b");
    m.artifacts["op.txt"] = sha256_hex("op");
    m.results["exit_code"] = "0";
    CHECK(m.config_sha256 == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    auto text = m.str();
    CHECK(text.rfind("[run]\nkind = \"reconstruct\"\n", 0) == 0);
    auto back = Manifest::parse(text);
    CHECK(back.str() == text);
    CHECK(back.inputs == m.inputs);
}

TEST_CASE("lift_operator") {
    std::vector<ThetaOpP> mods;
    for (u32 p : default_primes(8)) mods.push_back(lex_normalized(reduce(gauss, p)));
    CHECK(same_up_to_sign(lift_operator(mods), gauss));
    CHECK_THROWS_AS(lift_operator({}), InsufficientSamples);

    // 22-digit coefficients need far more than four primes
    ThetaOpQ big = big_operator();
    std::vector<ThetaOpP> few;
    for (u32 p : default_primes(4)) few.push_back(lex_normalized(reduce(big, p)));
    LiftFailure f;
    CHECK_THROWS_AS(lift_operator(few, 1, &f), NoConsistentK);
    CHECK(f.failed > 0);
    CHECK(f.total == 4);
}

TEST_CASE("reconstruction of a planted Gauss operator") {
    TempDir d("gauss");
    write_file(d / "gauss.op", write_op(gauss));
    auto rep = run_config(d, "run.toml",
                          reconstruct_toml("out", "gauss.op", 10, 3, 3, 60,
                                           "[verify]\npcurv_primes = [3, 5, 7]\nrequire_nilpotent = true\n"
                                           "require_rational_exponents = true\n"));
    CHECK(rep.exit_code == 0);
    REQUIRE(rep.op);
    CHECK(same_up_to_sign(*rep.op, gauss));
    for (const auto& c : rep.checks) CHECK_MESSAGE(c.ok, c.name);

    auto man = Manifest::parse(read_file(d / "out/manifest.toml"));
    CHECK(man.kind == "reconstruct");
    CHECK(man.config_sha256 == sha256_hex(read_file(d / "run.toml")));
    CHECK(man.inputs.count("gauss.op"));
    for (const char* a : {"op.txt", "verify.log", "report.txt", "config.toml"}) CHECK(man.artifacts.count(a));
    CHECK(man.artifacts.size() == 14);
    CHECK(man.results.at("order") == "2");
    CHECK(man.results.at("exit_code") == "0");

    auto v = verify_run(d / "out/manifest.toml");
    CHECK(v.exit_code == 0);

    // rerun into a second directory: identical artifacts
    auto rep2 = run_config(d, "run.toml",
                           reconstruct_toml("out", "gauss.op", 10, 3, 3, 60,
                                            "[verify]\npcurv_primes = [3, 5, 7]\nrequire_nilpotent = true\n"
                                            "require_rational_exponents = true\n"));
    auto man2 = Manifest::parse(read_file(d / "out/manifest.toml"));
    CHECK(man2.str() == man.str());

    // tampering is caught
    write_file(d / "out/op.txt", write_op(clausen));
    CHECK(verify_run(d / "out/manifest.toml").exit_code != 0);
}

TEST_CASE("golden manifest") {
    TempDir d("golden");
    const std::string golden = ODEFORGE_GOLDEN_DIR;
    for (const char* f : {"gauss.op", "gauss_run.toml"}) fs::copy_file(golden + "/" + f, d / f);
    auto rep = run_reconstruction_pipeline(load_config(d / "gauss_run.toml"));
    CHECK(rep.exit_code == 0);
    std::string text = read_file(d / "out/manifest.toml");
    std::string base = fs::absolute(d.path).lexically_normal().string();
    auto at = text.find(base);
    REQUIRE(at != std::string::npos);
    text.replace(at, base.size(), "<base>");
    CHECK(text == read_file(golden + "/gauss_manifest.toml"));
}

TEST_CASE("reconstruction of a factored order four operator") {
    TempDir d("prod4");
    // gauss with theta -> theta + 1 has no analytic solution, so the
    // analytic solution of the product needs all four orders
    ThetaOpQ shifted = theta_from_rows({{4, -9}, {8, -12}, {4, -4}});
    ThetaOpQ l = multiply(gauss, shifted);
    REQUIRE(l.order() == 4);
    write_file(d / "l.op", write_op(l));
    write_file(d / "g.op", write_op(shifted));
    auto rep = run_config(d, "run.toml",
                          reconstruct_toml("out", "l.op", 10, 4, 4, 80,
                                           "[verify]\nfactors = [\"g.op\"]\npcurv_primes = [5, 7]\n"));
    CHECK(rep.exit_code == 0);
    REQUIRE(rep.op);
    CHECK(same_up_to_sign(*rep.op, primitive(l)));
    CHECK(verify_run(d / "out/manifest.toml").exit_code == 0);
}

TEST_CASE("too few primes gives budget advice") {
    TempDir d("few");
    ThetaOpQ big = big_operator();
    write_file(d / "big.op", write_op(big));
    auto rep = run_config(d, "run.toml", 
                          "[pipeline]\noutput_dir = \"out\"\n[primes]\ncount = 5\n[budget]\nmax_order = 1\n"
                          "max_degree = 1\ndrop = 1\n[planted]\noperator = \"big.op\"\nseed = [1]\nterms = 40\n");
    CHECK(rep.exit_code == 1);
    CHECK_FALSE(rep.op);
    CHECK(rep.advice.find("primes") != std::string::npos);
    bool saw = false;
    for (const auto& l : rep.log) saw = saw || l.find("NoConsistentK") != std::string::npos;
    CHECK(saw);
    CHECK(Manifest::parse(read_file(d / "out/manifest.toml")).results.at("exit_code") == "1");
}

TEST_CASE("factor probing") {
    TempDir d("factor");
    ThetaOpQ prod = multiply(theta_from_rows({{0, -1}, {1}}), gauss);
    write_file(d / "prod.op", write_op(prod));
    write_file(d / "clausen.op", write_op(clausen));

    auto rep = run_config(d, "f.toml", factor_toml("fout", "prod.op"));
    CHECK(rep.exit_code == 0);
    auto fr = probe_factors(read_op_file(d / "prod.op"), load_config(d / "f.toml"));
    REQUIRE(fr.factors.size() >= 1);
    REQUIRE(fr.factors[0].exact);
    CHECK(same_up_to_sign(*fr.factors[0].exact, gauss));
    CHECK(fs::exists(d / "fout/factor_0.txt"));
    CHECK(verify_run(d / "fout/manifest.toml").exit_code == 0);

    // irreducible: nothing divides, every probe is excluded or swept
    auto cr = probe_factors(read_op_file(d / "clausen.op"), parse_config(factor_toml("c", "clausen.op"), d.path.string()));
    CHECK(cr.factors.empty());
    CHECK_FALSE(cr.exclusions.empty());
    CHECK(cr.exit_code == 0);

    auto cu = probe_factors(read_op_file(d / "clausen.op"),
                            parse_config(factor_toml("c", "clausen.op", "sweep = false\n"), d.path.string()));
    CHECK(cu.factors.empty());
    REQUIRE_FALSE(cu.undecided.empty());
    CHECK(cu.exit_code == 2);
}

TEST_CASE("factor tree of a three factor chain") {
    TempDir d("chain");
    ThetaOpQ a = theta_from_rows({{-1, -1}, {1}});     // theta - 1 - w
    ThetaOpQ b = theta_from_rows({{0, -3}, {2, -2}});  // 2(1-w) theta - 3w
    ThetaOpQ c = theta_from_rows({{0, -1}, {1, -1}});  // (1-w) theta - w
    write_file(d / "chain.op", write_op(multiply(multiply(a, b), c)));
    auto rep = run_config(d, "f.toml", factor_toml("out", "chain.op"));
    CHECK(rep.exit_code == 0);

    auto fr = probe_factors(read_op_file(d / "chain.op"), load_config(d / "f.toml"));
    REQUIRE(fr.tree.size() == 5);
    std::vector<ThetaOpQ> leaves;
    for (const auto& n : fr.tree)
        if (n.op.order() == 1) leaves.push_back(n.op);
    REQUIRE(leaves.size() == 3);
    for (const auto& want : {a, b, c}) {
        bool seen = false;
        for (const auto& l : leaves) seen = seen || same_up_to_sign(l, want);
        CHECK(seen);
    }
    // the deepest right factor is c, and the left part splits into b then a
    CHECK(same_up_to_sign(fr.tree[1].op, c));
    CHECK(fr.tree[1].role == "right");
    CHECK(fr.tree[2].status.rfind("split", 0) == 0);

    auto text = read_file(d / "out/factors.txt");
    CHECK(text.find("node 4 parent=2 role=left order=1") != std::string::npos);
    auto v = verify_run(d / "out/manifest.toml");
    CHECK(v.exit_code == 0);
    std::size_t tree_checks = 0;
    for (const auto& ch : v.checks) tree_checks += ch.name.rfind("tree node", 0) == 0;
    CHECK(tree_checks == 2);
}

TEST_CASE("one free coefficient swept modulo 101") {
    TempDir d("sweep");
    // exp(5w) is a + 5 b in the Frobenius basis at 0, so no single basis
    // solution has a first order annihilator
    ThetaOpQ r = theta_from_rows({{0, -5}, {1}});
    ThetaOpQ a = theta_from_rows({{-2, 1}, {2, -2}});
    write_file(d / "l.op", write_op(multiply(a, r)));
    auto cfg = parse_config(factor_toml("out", "l.op", "sweep_prime = 101\n"), d.path.string());
    cfg.factor_max_order = 1;
    auto fr = probe_factors(read_op_file(d / "l.op"), cfg);
    bool swept = false;
    for (const auto& f : fr.factors) {
        if (f.solution.rfind("sweep", 0) != 0) continue;
        swept = true;
        CHECK(f.solution == "sweep alpha=5 mod 101");
        CHECK(f.modp == lex_normalized(reduce(r, 101)));
    }
    CHECK(swept);
    bool excluded_zero = false;
    for (const auto& e : fr.exclusions) excluded_zero = excluded_zero || e.frame == "0";
    CHECK(excluded_zero);
}

TEST_CASE("command line exit codes") {
    TempDir d("cli");
    write_file(d / "gauss.op", write_op(gauss));
    write_file(d / "clausen.op", write_op(clausen));
    write_file(d / "r.toml", reconstruct_toml("out", "gauss.op", 10, 3, 3, 60));
    write_file(d / "u.toml", factor_toml("u", "clausen.op", "sweep = false\n"));
    write_file(d / "bad.toml", "[pipeline]\nkind = \"reconstruct\"\nbogus = 1\n");

    CHECK(run_cli("pipeline reconstruct --config " + (d / "r.toml")) == 0);
    CHECK(run_cli("pipeline verify --manifest " + (d / "out/manifest.toml")) == 0);
    CHECK(run_cli("pipeline factor --config " + (d / "u.toml")) == 2);
    CHECK(run_cli("pipeline reconstruct --config " + (d / "bad.toml")) == 1);
    CHECK(run_cli("op pcurv " + (d / "gauss.op") + " --prime 5") == 0);
    CHECK(run_cli("no-such-command") != 0);
}
