#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace plaq {

// Exact plus-boundary magnetization at the origin of [-ell, ell]^2 for the
// SPM, through the binomial row/column-cycle sums.
struct MagnetizationResult {
    int32_t ell = 0;
    double beta = 0;
    int64_t L = 0;       // 2*ell + 2
    double log_num = 0;  // log N(beta)
    double log_den = 0;  // log D(beta)
    double value = 0;    // N/D = mu^+_Lambda(sigma_0)
    bool brute_force = false;
};

MagnetizationResult magnetization_plus_exact(int32_t ell, double beta);

// Enumeration oracle; ell = 1 only (9 interior spins).
MagnetizationResult magnetization_brute_force(int32_t ell, double beta);

struct DecayScanRow {
    int64_t ell = 0;
    double value = 0;
};
struct DecayScan {
    std::vector<DecayScanRow> rows;
    std::optional<int64_t> crossover;  // smallest scanned ell with value < threshold
};
DecayScan magnetization_decay_scan(double beta, const std::vector<int64_t>& ells, double threshold = 0.2);

}  // namespace plaq
