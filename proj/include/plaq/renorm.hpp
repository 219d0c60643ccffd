#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "plaq/geometry.hpp"
#include "plaq/gibbs.hpp"

namespace plaq {

// q(beta) = e^{-beta/2}/(e^{-beta/2}+e^{beta/2}) = 1/(1+e^beta)
double q_of_beta(double beta);
// inverse; q must lie in (0, 1/2]
double beta_of_q(double q);
// phi(q,k) = 1/2 - (1/2)(1-2q)^k
double phi_q_k(double q, double k);

// Decimation step: any positive ell for the SPM, ell = 2^n for the TPM.
struct RenormSpec {
    ModelSpec model;
    int32_t ell = 1;  // SPM step, or 2^n for TPM
    int32_t n = 0;    // TPM exponent

    static RenormSpec spm(int32_t ell);
    static RenormSpec tpm_n(int32_t n);
    static RenormSpec tpm_ell(int32_t ell);  // rejects ell not a power of two

    // k = ell^2 (SPM) or 3^n (TPM), computed exactly.
    long double k() const;
};

struct BetaPrime {
    double value = 0;
    bool exact_zero = false;  // underflowed to exactly zero
    bool linearized = false;  // reported via the asymptotic 2(1-2q)^k
};
BetaPrime beta_prime(double beta, const RenormSpec& spec);

// [eta]_{scale*B* + x}: product of the decimated spins at the corners of the
// scaled plaquette. `spin` must be defined on the needed sites.
int8_t renormalized_plaquette(const ModelSpec& model, const std::function<int8_t(Site)>& spin,
                              Site x, int32_t scale);

// Spin reconstruction from boundary spins plus plaquette variables.
// SPM block {0..side-1}^2: south+west boundary given, row-major sweep.
std::vector<int8_t> spm_reconstruct(int32_t side, const std::function<int8_t(Site)>& boundary,
                                    const std::function<int8_t(Site)>& plaq_var);
// TPM triangle {0<=x<=y<=m}: west boundary given, column sweep.
// Returned spins are indexed by Region::decimation_triangle site order.
std::vector<int8_t> tpm_reconstruct(int32_t m, const Region& tri, const std::function<int8_t(Site)>& west,
                                    const std::function<int8_t(Site)>& plaq_var);

// Streaming sampler of the free-boundary Gibbs measure via its product
// representation: uniform boundary spins plus i.i.d. plaquette variables with
// P(-1) = q(beta), then the unique consistent reconstruction.
class FreeGibbsSampler {
  public:
    // SPM: region Lambda_{ell,N}; TPM: region T_{n,N} (ell_or_n = n).
    FreeGibbsSampler(const ModelSpec& model, int32_t ell_or_n, int32_t N, double beta, uint64_t seed);
    SpinConfig sample(uint64_t sample_index) const;  // deterministic per index
    const Region& region() const { return region_; }
    const std::vector<Site>& plaquette_bases() const { return bases_; }

  private:
    ModelSpec model_;
    Region region_;
    std::vector<Site> bases_;     // inside plaquette bases
    std::vector<Site> boundary_;  // south+west (SPM) or west (TPM) sites
    int32_t side_ = 0;            // SPM: ell*N+1 ; TPM: m = 2^{n+N}
    double q_ = 0;
    uint64_t seed_ = 0;
};

struct DecimationReport {
    double beta = 0;
    double beta_prime = 0;
    double max_discrepancy = 0;
    int64_t coarse_states = 0;
    bool pass(double tol = 1e-10) const { return max_discrepancy <= tol; }
};

// Exact check of the decimation identity: the marginal of the free-boundary
// Gibbs measure on the decimated sublattice against the unit-step free
// measure at beta'. SPM: Lambda_{ell,N} vs Lambda_{1,N}; TPM: T_{n,N} vs the
// triangle of corner 2^N.
DecimationReport decimation_check(const ModelSpec& model, int32_t ell_or_n, int32_t N, double beta);

// The recursive flip sets T_i (|T_i| = 3^{i+1}, ell_i = 2^{i+1}-1).
std::vector<Site> tpm_flip_set(int32_t i, Site anchor = {0, 0});
int32_t tpm_flip_ell(int32_t i);

// Plaquette bases whose variables change when every spin of `sites` flips.
std::vector<Site> flipped_plaquette_bases(const ModelSpec& model, const std::vector<Site>& sites);

}  // namespace plaq
