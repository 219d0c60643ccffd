#include "plaq/screening.hpp"

#include <algorithm>
#include <cmath>

#include "plaq/cycles.hpp"
#include "plaq/enumerate.hpp"
#include "plaq/parallel.hpp"

namespace plaq {

ScreeningResult screening_ratio(const ModelSpec& model, int32_t n, double beta,
                                uint64_t family_seed, int family_random_members,
                                int exhaustive_ring_cap) {
    ScreeningResult res;
    double t = std::tanh(beta / 2.0);
    double expfac = std::exp(2.0 * (n + 2) * std::pow(t, (n + 1) / 3.0));
    res.bound = 3.0 * expfac - 2.0;
    res.bound_applicable = expfac <= 4.0 / 3.0;

    Region block = model.kind == Model::SPM ? Region::square(n) : Region::triangle(n);
    PlaquetteUniverse u = PlaquetteUniverse::build(model, block, PlaqMode::meeting);

    if (beta == 0) {  // all weights 1: Z is boundary independent
        res.ratio = 1;
        res.exact = true;
        return res;
    }

    SiteSet ringset;
    for (const auto& p : u.plaquettes)
        for (Site s : p.exterior_sites) ringset.insert(s);
    std::vector<Site> ring(ringset.begin(), ringset.end());
    std::sort(ring.begin(), ring.end());

    const int nsites = int(block.size());
    const int m = int(u.size());
    const bool exhaustive = int(ring.size()) <= exhaustive_ring_cap && nsites + int(ring.size()) <= 25;
    res.exact = exhaustive;

    std::vector<std::vector<int>> site_to_plaqs(static_cast<size_t>(nsites));
    for (int p = 0; p < m; ++p)
        for (int s : u.plaquettes[size_t(p)].region_site_idx) site_to_plaqs[size_t(s)].push_back(p);
    auto wt = detail::weight_table(m, beta);

    auto log_z_for_signs = [&](const std::vector<int8_t>& ext_sign) {
        std::vector<int8_t> spins(size_t(nsites), 1);
        std::vector<int8_t> val(static_cast<size_t>(m));
        int energy = 0;
        for (int p = 0; p < m; ++p) {
            val[size_t(p)] = ext_sign[size_t(p)];
            energy += val[size_t(p)];
        }
        long double z = wt[size_t((energy + m) / 2)];
        const uint64_t nconf = uint64_t(1) << nsites;
        for (uint64_t k = 1; k < nconf; ++k) {
            int sflip = std::countr_zero(k);
            spins[size_t(sflip)] = int8_t(-spins[size_t(sflip)]);
            for (int p : site_to_plaqs[size_t(sflip)]) {
                energy -= 2 * val[size_t(p)];
                val[size_t(p)] = int8_t(-val[size_t(p)]);
            }
            z += wt[size_t((energy + m) / 2)];
        }
        return beta * double(m) / 2.0 + double(std::log(z));
    };

    double lo = 1e300, hi = -1e300;
    if (exhaustive) {
        std::unordered_map<Site, int, SiteHash> ridx;
        for (int i = 0; i < int(ring.size()); ++i) ridx.emplace(ring[size_t(i)], i);
        std::vector<std::vector<int>> plaq_ring(static_cast<size_t>(m));
        for (int p = 0; p < m; ++p)
            for (Site s : u.plaquettes[size_t(p)].exterior_sites)
                plaq_ring[size_t(p)].push_back(ridx.at(s));
        const uint64_t ntau = uint64_t(1) << ring.size();
        const int nblocks = int(std::min<uint64_t>(64, ntau));
        const uint64_t per = ntau / uint64_t(nblocks);
        auto partial = run_blocks<std::pair<double, double>>(nblocks, [&](int blk) {
            double blo = 1e300, bhi = -1e300;
            std::vector<int8_t> ext(static_cast<size_t>(m));
            const uint64_t t0 = uint64_t(blk) * per;
            const uint64_t t1 = (blk == nblocks - 1) ? ntau : t0 + per;
            for (uint64_t tau = t0; tau < t1; ++tau) {
                for (int p = 0; p < m; ++p) {
                    int sgn = 1;
                    for (int r : plaq_ring[size_t(p)]) sgn *= ((tau >> r) & 1) ? -1 : 1;
                    ext[size_t(p)] = int8_t(sgn);
                }
                double lz = log_z_for_signs(ext);
                blo = std::min(blo, lz);
                bhi = std::max(bhi, lz);
            }
            return std::make_pair(blo, bhi);
        });
        for (auto [a, b] : partial) {
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
    } else {
        for (const auto& bc : declared_bc_family(family_seed, family_random_members)) {
            std::vector<int8_t> ext(static_cast<size_t>(m));
            for (int p = 0; p < m; ++p) {
                int8_t sgn = 1;
                for (Site s : u.plaquettes[size_t(p)].exterior_sites) sgn = int8_t(sgn * bc.sign(s));
                ext[size_t(p)] = sgn;
            }
            double lz = log_z_for_signs(ext);
            lo = std::min(lo, lz);
            hi = std::max(hi, lz);
        }
    }
    res.ratio = std::exp(hi - lo);
    return res;
}

}  // namespace plaq
