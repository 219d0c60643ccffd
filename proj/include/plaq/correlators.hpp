#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plaq/geometry.hpp"

namespace plaq {

struct MultispinInfinite {
    bool equivalent = false;  // A ~ empty set
    int64_t n = 0;            // minimal decomposition size (when equivalent)
    double value = 0;         // 0 or tanh(beta/2)^n
    double log_value = 0;     // n * log tanh(beta/2) (when equivalent, beta > 0)
};

// Infinite-volume multispin average mu^beta([sigma]_A).
MultispinInfinite multispin_infinite(const ModelSpec& model, const std::vector<Site>& A, double beta);

enum class FiniteMethod : uint8_t { cycle_expansion, enumeration };

struct MultispinFinite {
    double value = 0;
    int64_t n_alpha = 0;       // size of the clipped-plaquette representation used
    double plus_lower_bound = 0;  // tanh(beta/2)^{n_alpha}
    FiniteMethod method = FiniteMethod::cycle_expansion;
};

// Plus-boundary multispin average on a finite box via the cycle expansion
// over K+(Lambda), or by direct spin enumeration.
MultispinFinite multispin_plus_finite(const ModelSpec& model, const Region& box, const std::vector<Site>& A,
                                      double beta, FiniteMethod method = FiniteMethod::cycle_expansion);

}  // namespace plaq
