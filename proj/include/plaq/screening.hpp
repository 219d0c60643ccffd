#pragma once

#include <cstdint>

#include "plaq/geometry.hpp"
#include "plaq/gibbs.hpp"

namespace plaq {

struct ScreeningResult {
    double ratio = 1;   // sup_{tau,tau'} Z^{tau,P} / Z^{tau',P}, P = B(T*^(n))
    double bound = 0;   // 3 exp(2(n+2) tanh(beta/2)^{(n+1)/3}) - 2
    bool exact = false; // boundary sup exhaustive
    bool bound_applicable = false;  // the exponential factor is <= 4/3
};

// Partition-function ratio over boundary conditions on the screening block
// T*^(n) (the square [n]^2 for the SPM, the right triangle for the TPM),
// with the full meeting family, against its closed-form bound.
ScreeningResult screening_ratio(const ModelSpec& model, int32_t n, double beta,
                                uint64_t family_seed = 12345, int family_random_members = 8,
                                int exhaustive_ring_cap = 20);

}  // namespace plaq
