#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plaq/geometry.hpp"
#include "plaq/gibbs.hpp"

namespace plaq {

enum class LengthKind : uint8_t { mix, cavity, multispin, renorm };
enum class Certainty : uint8_t { exact, bracket, lower_bound };

struct LengthEstimate {
    LengthKind kind = LengthKind::multispin;
    double beta = 0;
    int64_t lo = 1;
    int64_t hi = 1;
    Certainty certainty = Certainty::bracket;
};

// Closed-form multispin bracket: lo from the extremal families (n = ell^2 for
// the SPM squares, 3^k for the TPM triangles of side 2^k), hi from the
// rigorous lower bound on minimal decompositions (ell^2/4, resp. 3^{k-1}).
LengthEstimate ell_multispin(const ModelSpec& model, double beta, double threshold = 0.2);

struct CavityOptions {
    double u = 0.1;  // total-variation threshold
    int32_t R = 3;   // box side in units of ell
    int32_t max_ell = 3;
    uint64_t seed = 12345;
    int family_random_members = 8;
    // MCMC fallback parameters for boxes above the enumeration cap
    int64_t sweeps = 4000;
    int64_t burnin = 800;
    double mcmc_beta_cap = 2.5;
};
LengthEstimate ell_cavity_estimate(const ModelSpec& model, double beta, const CavityOptions& opt = {});

struct MixOptions {
    double eps0 = 0.1;
    int32_t max_ell = 3;
    uint64_t seed = 12345;
    int family_random_members = 8;
};
LengthEstimate ell_mix_estimate(const ModelSpec& model, double beta, const MixOptions& opt = {});

// Smallest decimation step with beta' <= 1 (TPM steps are powers of two).
int64_t renorm_length(const ModelSpec& model, double beta);

// Ordinary least squares slope.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// d(ln ell)/d(beta) of the multispin lo-scan / renorm length over a beta grid.
double multispin_slope(const ModelSpec& model, double beta_lo, double beta_hi, double step,
                       double threshold = 0.2);
double renorm_slope(const ModelSpec& model, double beta_lo, double beta_hi, double step);

struct OrderingRow {
    double beta = 0;
    LengthEstimate multispin;
    LengthEstimate cavity;
    LengthEstimate mix;
    int64_t renorm = 1;
    bool ordering_ok = false;  // multispin.lo <= cavity estimate
};
std::vector<OrderingRow> ordering_report(const ModelSpec& model, const std::vector<double>& betas,
                                         const CavityOptions& copt = {}, const MixOptions& mopt = {});

}  // namespace plaq
