#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "plaq/geometry.hpp"
#include "plaq/gibbs.hpp"

namespace plaq {

enum class Dynamics : uint8_t { heat_bath, metropolis };
enum class ScanOrder : uint8_t { random, sequential };

// Seeded single-spin-flip sampler. Identical ChainSpec -> bit-identical
// trajectory: all randomness comes from the counter-based stream
// (seed, chain_id, step), two draws per step.
struct ChainSpec {
    ModelSpec model;
    int32_t width = 8, height = 8;
    Site origin{0, 0};
    bool torus = false;
    double beta = 1.0;
    BoundaryCondition bc;  // ignored for torus
    Dynamics dynamics = Dynamics::heat_bath;
    ScanOrder scan = ScanOrder::random;
    uint64_t seed = 1;
    uint64_t chain_id = 0;
    int64_t sweeps = 1000;
    int64_t burnin = 200;
    int64_t thin = 1;
    // Relaxation times grow like e^beta; validation above this is unreliable.
    double low_temp_warning = 2.5;
};

class McChain {
  public:
    explicit McChain(const ChainSpec& spec);

    void step();                 // one proposed single-spin update
    void sweep();                // width*height steps
    void run_sweeps(int64_t n);

    int8_t spin(Site s) const;   // interior, wrapped, or boundary value
    const std::vector<int8_t>& spins() const { return spins_; }
    const Region& region() const { return region_; }
    const ChainSpec& spec() const { return spec_; }
    uint64_t steps_taken() const { return step_; }

    // heat-bath probability of setting the given interior site to +1
    double prob_plus(int idx) const;

  private:
    void update_site(int idx, double u);

    ChainSpec spec_;
    Region region_;
    std::vector<int8_t> spins_;
    struct Nbr {
        std::vector<int> idx;  // other members of one plaquette through the site
        int8_t ext = 1;
    };
    std::vector<std::vector<Nbr>> nbrs_;
    uint64_t step_ = 0;
};

using McObservable = std::function<double(const McChain&)>;

McObservable mc_site_observable(Site s);
McObservable mc_product_observable(std::vector<Site> sites);
// Fraction of plaquettes with [sigma]_B = -1 among bases at least `margin`
// away from the region edge (all bases on a torus).
McObservable mc_defect_density_observable(int32_t margin);

struct SeriesStats {
    double mean = 0;
    double se = 0;  // batch-means standard error
    int64_t n = 0;
    int batches = 0;
};
SeriesStats batch_means(const std::vector<double>& series, int nbatches = 32);

struct ChainResult {
    std::vector<std::vector<double>> series;  // per observable
    std::vector<SeriesStats> stats;
    bool low_temp_warning = false;
};
ChainResult run_chain(const ChainSpec& spec, const std::vector<McObservable>& observables);

struct Estimate {
    double value = 0;
    double se = 0;
};
// Time-series average of [sigma]_A.
Estimate estimate_multispin(const ChainSpec& spec, const std::vector<Site>& A);

}  // namespace plaq
