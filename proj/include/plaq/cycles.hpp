#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plaq/f2.hpp"
#include "plaq/geometry.hpp"

namespace plaq {

// ParitySet: a set of plaquettes over a fixed universe, with symmetric
// difference as addition.
using ParitySet = f2::Bitset;

// 1 iff C(row, col) is odd (0 outside [0,row]); Lucas / bitwise domination.
inline int pascal_parity(int64_t row, int64_t col) {
    if (col < 0 || col > row) return 0;
    return (row & col) == col ? 1 : 0;
}

struct CycleBasis {
    PlaquetteUniverse universe;
    std::vector<ParitySet> generators;
    std::string provenance;
    int rank = 0;        // dimension of the span
    int relations = 0;   // generator count - rank
};

// True iff every region site lies in an even number of members.
bool is_cycle(const PlaquetteUniverse& u, const ParitySet& alpha);

// 2(n+1) stripe cycles H_0..H_n, V_0..V_n on [n]^2 with meeting plaquettes.
CycleBasis spm_stripe_basis(int32_t n);
// n+2 Pascal-triangle cycles P_{-1}..P_n on T*^(n) with meeting plaquettes.
CycleBasis tpm_pascal_basis(int32_t n);
// Row and column cycles {R_i, C_i}_{i=0..2l+1} on [-l,l]^2, clipped mode.
CycleBasis plus_bc_generators(int32_t ell);

// F2 coefficients of alpha over the basis generators; nullopt = not-in-span.
std::optional<std::vector<uint8_t>> decompose(const ParitySet& alpha, const CycleBasis& basis);

// Exact sum of t^{|alpha|} over the span of the basis (each cycle once).
double weighted_cycle_sum(const CycleBasis& basis, double t, bool skip_empty);

// Right-hand side of the cycle-sum bound: exp{2(n+2) t^{(n+1)/3}} - 1.
double cycle_sum_bound(int32_t n, double t);

// A basis of the full cycle space K of the universe (nullspace of the
// site/plaquette incidence).
std::vector<ParitySet> cycle_space_basis(const PlaquetteUniverse& u);

struct StaircaseProduct {
    double lhs = 0;
    double rhs = 0;
    bool staircase_ok = false;
};
// Brute-force E[exp{c sum_k 1([sigma]_{A_k} = -1)}] over uniform +-1
// assignments vs the closed form 2^{-m}(e^c+1)^m, plus the staircase check
// A_k \ (A_1 u ... u A_{k-1}) != empty.
StaircaseProduct staircase_product_check(const std::vector<std::vector<int64_t>>& sets, double c);

// |alpha(W)| for W with i row cycles and j column cycles on [-l,l]^2.
int64_t alpha_W_cardinality(int32_t ell, int32_t i, int32_t j);
// |alpha(W) delta alpha_*| for W with u rows among R_0..R_l, v rows among
// R_{l+1}..R_{2l+1}, j columns among C_0..C_l, k columns among
// C_{l+1}..C_{2l+1}.
int64_t alpha_W_delta_cardinality(int32_t ell, int32_t u, int32_t v, int32_t j, int32_t k);

struct TwoRouteSum {
    double lhs = 0;
    double rhs = 0;
};
// sum_{alpha in K+(Lambda)} f(alpha) vs (1/2) sum_{W subset G} f(alpha(W)),
// both sides computed independently.
TwoRouteSum generator_subset_sum_check(int32_t ell, const std::function<double(const ParitySet&)>& f);

// A(z) = {j in [n]_- : z + B* in P_j} for z in T^(n), via Lucas parity.
std::vector<int32_t> a_of_z(int32_t n, Site z);

}  // namespace plaq
