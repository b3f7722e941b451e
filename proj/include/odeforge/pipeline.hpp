#pragma once

// End-to-end runs: per-prime guessing, lifting, verification, factor
// probing, and the manifests that record them.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odeforge/localfrob.hpp"
#include "odeforge/reconstruct.hpp"
#include "odeforge/textio.hpp"

namespace odeforge {

struct PipelineConfig {
    std::string kind;          // reconstruct or factor
    std::string base_dir;      // relative paths resolve against this
    std::string output_dir = "out";
    unsigned jobs = 1;

    // prime pool: explicit list, else `prime_count` primes below `prime_bound`
    std::vector<u32> primes;
    std::size_t prime_count = 8;
    u32 prime_bound = 1u << 15;

    int max_order = 4;
    int max_degree = 6;
    int margin = 10;
    long extend_to = 0;       // 0: no extension stage
    int reguess_degree = 0;   // 0: same as max_degree
    int drop = 3;             // stability redundancy for lifts
    long budget_horizon = 0;  // index range for prime-budget advice; 0: number of coefficients

    // inputs: per-prime series files, or a planted operator with a seed
    std::vector<std::string> series_files;
    std::string planted_operator;
    std::vector<mpq_class> planted_seed;
    long planted_terms = 0;

    std::vector<u32> pcurv_primes;
    std::vector<std::string> factor_files;
    bool require_rational_exponents = false;
    bool require_nilpotent = false;

    // factor pipeline
    std::string operator_file;
    u32 factor_prime = 0;     // 0: first prime of the pool
    std::size_t lift_primes = 8;
    int factor_max_order = 3;
    int factor_max_degree = 8;
    int depth_budget = 4;
    bool sweep = true;
    u32 sweep_prime = 101;
    bool tree = true;         // split exact factors recursively

    unsigned digits = 50;

    std::string source;  // the configuration text as read
};

// Parses and validates; throws ConfigError.
PipelineConfig parse_config(const std::string& toml_text, const std::string& base_dir = ".");
PipelineConfig load_config(const std::string& path);
std::vector<u32> prime_pool(const PipelineConfig& cfg);
std::string resolve(const PipelineConfig& cfg, const std::string& path);

std::string sha256_hex(const std::string& data);

struct Manifest {
    std::string kind;
    std::string config_sha256;
    std::map<std::string, std::string> inputs;     // path -> sha256
    std::map<std::string, std::string> artifacts;  // path relative to the output dir -> sha256
    std::map<std::string, std::string> results;

    std::string str() const;
    static Manifest parse(const std::string& text);
};

// Coefficientwise rational lift of operators normalized at the same
// position; the value must not change when `drop` primes are removed.
struct LiftFailure {
    std::vector<std::pair<long, mpq_class>> lifted;  // flat index -> value for the stable coefficients
    std::size_t failed = 0;
    std::size_t total = 0;
};

ThetaOpQ lift_operator(const std::vector<ThetaOpP>& ops, int drop = 3, LiftFailure* failure = nullptr);

// Exact series check over Q through all given terms.
bool annihilates(const ThetaOpQ& op, const std::vector<mpq_class>& s);

struct CheckLine {
    std::string name;
    bool ok = true;
    bool required = true;
    std::string detail;
};

struct PipelineReport {
    int exit_code = 0;  // 0 success, 2 undecided, 1 error
    std::vector<CheckLine> checks;
    std::vector<std::string> log;
    std::optional<ThetaOpQ> op;
    std::string advice;
    std::string text() const;
};

struct PrimeJob {
    u32 prime = 0;
    std::optional<ThetaOpP> op;
    std::string status;
    int order = 0, degree = 0;
};

PipelineReport run_reconstruction_pipeline(const PipelineConfig& cfg);

struct FactorFinding {
    std::string frame;
    std::string solution;
    int order = 0, degree = 0;
    std::optional<ThetaOpQ> exact;
    ThetaOpP modp;
};

struct Exclusion {
    std::string frame;
    std::string solution;
    std::string reason;
};

struct Undecided {
    std::string frame;
    std::size_t dimension = 0;
    std::size_t free_coefficients = 0;
};

// Exact factor tree: each split node has a right factor and the left
// quotient as children (the quotient is defined up to a rational left
// multiplier and stored primitive).
struct FactorNode {
    ThetaOpQ op;
    int parent = -1;
    std::string role;    // input, right or left
    std::string status;  // how the node was resolved
};

struct FactorReport {
    std::vector<FactorFinding> factors;
    std::vector<FactorNode> tree;
    std::vector<Exclusion> exclusions;
    std::vector<Undecided> undecided;
    std::vector<std::string> log;
    int exit_code = 0;
    std::string text() const;
};

FactorReport probe_factors(const OpText& input, const PipelineConfig& cfg);
PipelineReport run_factor_probe_pipeline(const PipelineConfig& cfg);

// Re-checks a finished run from its manifest and artifact files alone.
PipelineReport verify_run(const std::string& manifest_path);

}  // namespace odeforge
