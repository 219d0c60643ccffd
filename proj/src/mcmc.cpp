#include "plaq/mcmc.hpp"

#include <cmath>
#include <stdexcept>

#include "plaq/rng.hpp"

namespace plaq {

McChain::McChain(const ChainSpec& spec) : spec_(spec) {
    region_ = Region::box(spec.origin, spec.width, spec.height);
    spins_.assign(region_.size(), 1);
    nbrs_.resize(region_.size());
    const auto offsets = spec_.model.offsets();
    for (int i = 0; i < int(region_.size()); ++i) {
        Site s = region_.site(i);
        for (Site o : offsets) {
            Site base = s - o;
            Nbr nb;
            bool skip = false;
            for (Site t : plaquette_sites(spec_.model, base)) {
                if (t == s) continue;
                Site tt = t;
                if (spec_.torus) {
                    int32_t mx = tt.x - spec_.origin.x, my = tt.y - spec_.origin.y;
                    mx = ((mx % spec_.width) + spec_.width) % spec_.width;
                    my = ((my % spec_.height) + spec_.height) % spec_.height;
                    tt = {spec_.origin.x + mx, spec_.origin.y + my};
                }
                int idx = region_.index_of(tt);
                if (idx >= 0) {
                    nb.idx.push_back(idx);
                } else {
                    if (spec_.bc.is_free()) {
                        skip = true;  // free boundary: only fully interior plaquettes act
                        break;
                    }
                    nb.ext = int8_t(nb.ext * spec_.bc.sign(tt));
                }
            }
            if (!skip) nbrs_[size_t(i)].push_back(std::move(nb));
        }
    }
}

int8_t McChain::spin(Site s) const {
    Site t = s;
    if (spec_.torus) {
        int32_t mx = ((s.x - spec_.origin.x) % spec_.width + spec_.width) % spec_.width;
        int32_t my = ((s.y - spec_.origin.y) % spec_.height + spec_.height) % spec_.height;
        t = {spec_.origin.x + mx, spec_.origin.y + my};
    }
    int idx = region_.index_of(t);
    if (idx >= 0) return spins_[size_t(idx)];
    return spec_.bc.sign(s);
}

double McChain::prob_plus(int idx) const {
    double lambda = 0;
    for (const auto& nb : nbrs_[size_t(idx)]) {
        double p = nb.ext;
        for (int j : nb.idx) p *= spins_[size_t(j)];
        lambda += p;
    }
    return 1.0 / (1.0 + std::exp(-spec_.beta * lambda));
}

void McChain::update_site(int idx, double u) {
    if (spec_.dynamics == Dynamics::heat_bath) {
        spins_[size_t(idx)] = u < prob_plus(idx) ? int8_t(1) : int8_t(-1);
        return;
    }
    // Metropolis: accept the flip with probability min(1, e^{-beta sigma_i lambda_i})
    double lambda = 0;
    for (const auto& nb : nbrs_[size_t(idx)]) {
        double p = nb.ext;
        for (int j : nb.idx) p *= spins_[size_t(j)];
        lambda += p;
    }
    double logacc = -spec_.beta * double(spins_[size_t(idx)]) * lambda;
    if (logacc >= 0 || u < std::exp(logacc)) spins_[size_t(idx)] = int8_t(-spins_[size_t(idx)]);
}

void McChain::step() {
    const uint64_t n = region_.size();
    uint64_t pick;
    if (spec_.scan == ScanOrder::random)
        pick = rng::word(spec_.seed, spec_.chain_id, 2 * step_) % n;
    else
        pick = step_ % n;
    double u = rng::uniform01(spec_.seed, spec_.chain_id, 2 * step_ + 1);
    update_site(int(pick), u);
    ++step_;
}

void McChain::sweep() {
    for (int64_t i = 0; i < int64_t(region_.size()); ++i) step();
}

void McChain::run_sweeps(int64_t n) {
    for (int64_t i = 0; i < n; ++i) sweep();
}

McObservable mc_site_observable(Site s) {
    return [s](const McChain& c) { return double(c.spin(s)); };
}

McObservable mc_product_observable(std::vector<Site> sites) {
    return [sites = std::move(sites)](const McChain& c) {
        double p = 1;
        for (Site s : sites) p *= c.spin(s);
        return p;
    };
}

McObservable mc_defect_density_observable(int32_t margin) {
    return [margin](const McChain& c) {
        const ChainSpec& sp = c.spec();
        int64_t defects = 0, total = 0;
        const auto offsets = sp.model.offsets();
        int32_t span_x = 0, span_y = 0;
        for (Site o : offsets) {
            span_x = std::max(span_x, o.x);
            span_y = std::max(span_y, o.y);
        }
        int32_t x0 = sp.origin.x, y0 = sp.origin.y;
        int32_t x1, y1;
        if (sp.torus) {
            x1 = sp.origin.x + sp.width - 1;
            y1 = sp.origin.y + sp.height - 1;
        } else {
            x0 += margin;
            y0 += margin;
            x1 = sp.origin.x + sp.width - 1 - span_x - margin;
            y1 = sp.origin.y + sp.height - 1 - span_y - margin;
        }
        for (int32_t y = y0; y <= y1; ++y)
            for (int32_t x = x0; x <= x1; ++x) {
                int8_t p = 1;
                for (Site o : offsets) p = int8_t(p * c.spin({x + o.x, y + o.y}));
                defects += p < 0;
                ++total;
            }
        return total ? double(defects) / double(total) : 0.0;
    };
}

SeriesStats batch_means(const std::vector<double>& series, int nbatches) {
    SeriesStats st;
    st.n = int64_t(series.size());
    if (series.empty()) return st;
    double sum = 0;
    for (double v : series) sum += v;
    st.mean = sum / double(series.size());
    nbatches = int(std::min<int64_t>(nbatches, st.n));
    if (nbatches < 2) {
        st.batches = 1;
        st.se = 0;
        return st;
    }
    st.batches = nbatches;
    const int64_t per = st.n / nbatches;
    double var = 0;
    for (int b = 0; b < nbatches; ++b) {
        double bm = 0;
        for (int64_t i = b * per; i < (b + 1) * per; ++i) bm += series[size_t(i)];
        bm /= double(per);
        var += (bm - st.mean) * (bm - st.mean);
    }
    var /= double(nbatches - 1);
    st.se = std::sqrt(var / double(nbatches));
    return st;
}

ChainResult run_chain(const ChainSpec& spec, const std::vector<McObservable>& observables) {
    ChainResult res;
    res.low_temp_warning = spec.beta > spec.low_temp_warning;
    McChain chain(spec);
    chain.run_sweeps(spec.burnin);
    res.series.resize(observables.size());
    for (int64_t s = 0; s < spec.sweeps; ++s) {
        chain.sweep();
        if (spec.thin > 0 && s % spec.thin == 0)
            for (size_t i = 0; i < observables.size(); ++i)
                res.series[i].push_back(observables[i](chain));
    }
    for (const auto& series : res.series) res.stats.push_back(batch_means(series));
    return res;
}

Estimate estimate_multispin(const ChainSpec& spec, const std::vector<Site>& A) {
    ChainResult r = run_chain(spec, {mc_product_observable(A)});
    return {r.stats[0].mean, r.stats[0].se};
}

}  // namespace plaq
