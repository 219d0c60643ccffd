#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "plaq/geometry.hpp"

namespace plaq {

enum class BcKind : uint8_t { AllPlus, AllMinus, Free, Explicit, Random, Checkerboard, StripeH, StripeV };

// Rule producing spins outside a region. Explicit maps never default: a
// missing site is an error.
struct BoundaryCondition {
    BcKind kind = BcKind::AllPlus;
    std::unordered_map<Site, int8_t, SiteHash> values;  // Explicit
    uint64_t seed = 0;                                  // Random
    int parity = 0;                                     // stripes / checkerboard phase

    static BoundaryCondition all_plus() { return {BcKind::AllPlus, {}, 0, 0}; }
    static BoundaryCondition all_minus() { return {BcKind::AllMinus, {}, 0, 0}; }
    static BoundaryCondition free_bc() { return {BcKind::Free, {}, 0, 0}; }
    static BoundaryCondition explicit_bc(std::unordered_map<Site, int8_t, SiteHash> v) {
        return {BcKind::Explicit, std::move(v), 0, 0};
    }
    static BoundaryCondition random_bc(uint64_t seed) { return {BcKind::Random, {}, seed, 0}; }
    static BoundaryCondition checkerboard(int parity = 0) { return {BcKind::Checkerboard, {}, 0, parity}; }
    static BoundaryCondition stripe_h(int parity = 0) { return {BcKind::StripeH, {}, 0, parity}; }
    static BoundaryCondition stripe_v(int parity = 0) { return {BcKind::StripeV, {}, 0, parity}; }

    int8_t sign(Site s) const;
    bool is_free() const { return kind == BcKind::Free; }
    std::string name() const;
};

// The declared boundary family used for sup approximations: all-plus,
// all-minus, checkerboard, 4 structured stripes and n seeded-random members.
std::vector<BoundaryCondition> declared_bc_family(uint64_t seed, int n_random);

struct SpinConfig {
    Region region;
    std::vector<int8_t> interior;  // per region site, sorted order
    BoundaryCondition bc;

    int8_t spin(Site s) const {
        int i = region.index_of(s);
        return i >= 0 ? interior[size_t(i)] : bc.sign(s);
    }
    double product_over(const std::vector<Site>& v) const {
        int8_t p = 1;
        for (Site s : v) p = int8_t(p * spin(s));
        return p;
    }
};

struct GibbsSpec {
    ModelSpec model;
    Region region;
    double beta = 0;
    BoundaryCondition bc;
    PlaqMode mode = PlaqMode::meeting;
    // Optional restricted family P (bases); must contain every inside plaquette.
    std::optional<std::vector<Site>> restricted;
};

// Enumeration cap (sites). Default 28; PLAQ_ENUM_CAP overrides.
int enumeration_cap();
void set_enumeration_cap(int cap);

// Flattened enumeration input: interior site lists per active plaquette plus
// the boundary sign factor.
struct EnumerationPlan {
    int nsites = 0;
    std::vector<Site> sites;  // sorted region sites
    struct Plaq {
        std::vector<int> site_idx;
        int8_t ext_sign = 1;
    };
    std::vector<Plaq> plaqs;
    std::vector<std::vector<int>> site_to_plaqs;

    static EnumerationPlan build(const GibbsSpec& spec);
};

struct Spins {
    const int8_t* s = nullptr;
    const Region* region = nullptr;
    int8_t by_index(int i) const { return s[i]; }
    int8_t at(Site p) const { return s[size_t(region->index_of(p))]; }
};
using Observable = std::function<double(const Spins&)>;

// log Z by full enumeration with streaming log-sum-exp.
double log_partition_function(const GibbsSpec& spec);

double expectation(const GibbsSpec& spec, const Observable& f);
double covariance(const GibbsSpec& spec, const Observable& f, const Observable& g);
// One-pass version returning {E[f], E[g], Cov(f,g)}.
struct CovResult {
    double mean_f = 0, mean_g = 0, cov = 0;
};
CovResult covariance_full(const GibbsSpec& spec, const Observable& f, const Observable& g);

// h_x(sigma) = exp((beta/2) sum_{B contains x} ([sigma^x]_B - [sigma]_B)),
// x outside the region; every plaquette through x contributes (those not
// meeting the region read boundary spins only).
double h_x(const GibbsSpec& spec, Site x, const SpinConfig& config);
// h_x as an enumeration observable (boundary-dependent factors folded in).
Observable h_x_observable(const GibbsSpec& spec, Site x);

struct PhiOptions {
    bool allow_exhaustive = true;
    int exhaustive_ring_cap = 20;   // sites in the exterior ring
    uint64_t family_seed = 12345;
    int family_random_members = 8;
};
struct PhiResult {
    double value = 0;
    bool exact = false;  // true when the boundary sup was exhaustive
    Site best_x{}, best_y{};
};
// phi(ell) = sup_{x,y not in Q_ell, d(x,y) >= ell/4} sup_tau |Cov(h_x,h_y)|.
PhiResult phi_ell(const ModelSpec& model, int32_t ell, double beta, const PhiOptions& opt = {});

// e^{4 beta ||H||} * ell * phi(ell)
PhiResult sm_condition_value(const ModelSpec& model, int32_t ell, double beta, const PhiOptions& opt = {});

// Exact total variation between the V-marginals (V = concentric square of
// side ell inside Lambda of side R*ell) under two boundary conditions.
double tv_marginal_exact(const ModelSpec& model, int32_t ell, int32_t R, double beta,
                         const BoundaryCondition& tau, const BoundaryCondition& tau2);

struct TvSupResult {
    double value = 0;
    bool exact = false;
};
// sup over boundary pairs of the V-marginal total variation; exhaustive over
// all ring assignments when ell == 1 and the ring is small, else the declared
// family (lower bound).
TvSupResult tv_marginal_sup(const ModelSpec& model, int32_t ell, int32_t R, double beta,
                            uint64_t family_seed = 12345, int family_random_members = 8,
                            int exhaustive_ring_cap = 20);

}  // namespace plaq
