#pragma once

#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "odeforge/ffcore.hpp"

namespace odeforge {

struct Residue {
    u32 prime;
    u32 value;
};

using ResidueSet = std::vector<Residue>;

ResidueSet residues_of(const mpq_class& x, const std::vector<u32>& primes);

// |x| < prod/2, x = r_k mod p_k
mpz_class crt_lift(const ResidueSet& rs);
mpz_class crt_modulus(const ResidueSet& rs);

struct Pow2Lift {
    long k;
    mpz_class mantissa;
};

// Coefficient = 2^k * mantissa with the mantissa stable when any `drop`
// primes are removed.
Pow2Lift strip_pow2_lift(const ResidueSet& rs, long k_max, int drop = 3);

// True when the symmetric lift of rs survives removing any `drop` primes.
bool stable_under_drop(const mpz_class& x, const ResidueSet& rs, int drop = 3);

mpq_class rational_lift(const ResidueSet& rs);

mpz_class guess_normalizer(const std::vector<mpq_class>& coeffs);

struct BudgetFit {
    std::vector<std::pair<double, double>> samples;  // (n, r_n)
    double c0 = 0, c1 = 0, c2 = 0;                    // r(n) = c0 + c1 n + c2 n^2
    double fitted_max = 0;
    double argmax = 0;
    long predicted_max_primes = 0;
};

// r_n = ln|c_n| / ln(30000); rationals use ln|num| + ln(den)
double digits_measure(const mpq_class& c);

BudgetFit estimate_prime_budget(const std::vector<std::pair<long, mpq_class>>& partial, long horizon,
                                long headroom = 0);
BudgetFit fit_prime_budget(const std::vector<std::pair<double, double>>& samples, long horizon, long headroom = 0);

std::string budget_svg(const BudgetFit& fit, long horizon);

}  // namespace odeforge
