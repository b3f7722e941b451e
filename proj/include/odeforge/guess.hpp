#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odeforge/ffcore.hpp"
#include "odeforge/theta.hpp"

namespace odeforge {

struct RhsBasis {
    std::string label;
    PrimeSeries series;
};

// Right-hand side sum_t Q_t(w) B_t(w) with unknown polynomials Q_t of
// degree <= rhs_degree multiplying known series B_t.
struct RhsAnsatz {
    std::vector<RhsBasis> bases;
    int rhs_degree = 0;
};

struct FitReport {
    ThetaOpP op;
    // Q_t coefficients, low degree first; empty for homogeneous fits
    std::vector<std::vector<u32>> rhs_polys;
    int kernel_dim = 0;
    long unknowns = 0;
    long equations_used = 0;
    int scanned_order = 0;
    int scanned_degree = 0;
};

struct GuessOptions {
    int margin = 10;
    int min_order = 1;
};

long budget(long order, long degree, long n_bases = 0, long rhs_degree = 0);

FitReport guess_ode(const PrimeSeries& s, int max_order, int max_degree, const GuessOptions& opt = {});

FitReport guess_inhom(const PrimeSeries& s, int max_order, int max_degree, const RhsAnsatz& rhs,
                      GuessOptions opt = {.margin = 10, .min_order = 0});

// c_n with sum_i sum_j a_{i,j} (n-j)^i c_{n-j} = e_n for n up to offset+target_len-1.
PrimeSeries extend_series(const ThetaOpP& op, const PrimeSeries& seed, const std::optional<PrimeSeries>& rhs,
                          long target_len);

// L applied to s, checked through all available terms.
std::vector<u32> residual(const ThetaOpP& op, const PrimeSeries& s);

// (2/pi) K(4w) and (2/pi) E(4w) modulo p; len/2 must stay below p.
PrimeSeries elliptic_k_series(const PrimeField& f, std::size_t len);
PrimeSeries elliptic_e_series(const PrimeField& f, std::size_t len);

// w (1-16w^2)^(3-t) K^(4-t) E^t / ((1+4w)^6 (1-16w^2)^kappa), t = 0..4
RhsAnsatz elliptic_basis(const PrimeField& f, std::size_t len, int kappa = 0, int rhs_degree = 0);

}  // namespace odeforge
