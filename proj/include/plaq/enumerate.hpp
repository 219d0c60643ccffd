#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "plaq/gibbs.hpp"

namespace plaq::detail {

// Weight table: scaled weight exp(beta*(i - m)) for energy E = 2i - m, where
// m is the number of active plaquettes. All weights are <= 1, and the value
// for a given energy is identical at every step (no multiplicative drift).
inline std::vector<double> weight_table(int nplaqs, double beta) {
    std::vector<double> wt(size_t(nplaqs) + 1);
    for (int i = 0; i <= nplaqs; ++i) wt[size_t(i)] = std::exp(beta * double(i - nplaqs));
    return wt;
}

// Gray-code enumeration of the 2^k configurations with the sites
// [low_bits, nsites) frozen to the bits of `block`. The visitor is called for
// every configuration as visit(spins, scaled_weight, energy, flipped_site);
// flipped_site is -1 for the first configuration. scaled_weight =
// exp(beta*(E - m)/2)*... precisely exp(beta*((E+m)/2 - m)), so that
// log Z = beta*m/2 + log(sum of scaled weights).
template <typename Visitor>
void enumerate_block(const EnumerationPlan& plan, const std::vector<double>& wt,
                     int low_bits, uint64_t block, Visitor&& visit) {
    const int n = plan.nsites;
    const int m = int(plan.plaqs.size());
    std::vector<int8_t> spins(size_t(n), 1);
    for (int i = low_bits; i < n; ++i)
        if ((block >> (i - low_bits)) & 1) spins[size_t(i)] = -1;

    std::vector<int8_t> prod(static_cast<size_t>(m));
    int energy = 0;
    for (int p = 0; p < m; ++p) {
        int8_t v = plan.plaqs[size_t(p)].ext_sign;
        for (int s : plan.plaqs[size_t(p)].site_idx) v = int8_t(v * spins[size_t(s)]);
        prod[size_t(p)] = v;
        energy += v;
    }
    visit((const int8_t*)spins.data(), wt[size_t((energy + m) / 2)], energy, -1);
    const uint64_t total = uint64_t(1) << low_bits;
    for (uint64_t k = 1; k < total; ++k) {
        int b = std::countr_zero(k);
        spins[size_t(b)] = int8_t(-spins[size_t(b)]);
        for (int p : plan.site_to_plaqs[size_t(b)]) {
            energy -= 2 * prod[size_t(p)];
            prod[size_t(p)] = int8_t(-prod[size_t(p)]);
        }
        visit((const int8_t*)spins.data(), wt[size_t((energy + m) / 2)], energy, b);
    }
}

template <typename Visitor>
void enumerate_all(const EnumerationPlan& plan, double beta, Visitor&& visit) {
    auto wt = weight_table(int(plan.plaqs.size()), beta);
    enumerate_block(plan, wt, plan.nsites, 0, visit);
}

// Number of frozen top bits used to split work into deterministic blocks.
inline int block_bits(int nsites) {
    if (nsites <= 14) return 0;
    return std::min(6, nsites - 14);
}

}  // namespace plaq::detail
