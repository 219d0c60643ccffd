#include "plaq/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <set>
#include <stdexcept>

#include "plaq/enumerate.hpp"
#include "plaq/parallel.hpp"
#include "plaq/rng.hpp"

namespace plaq {

namespace {
int g_thread_cap = 0;
int g_enum_cap = -1;
}  // namespace

int thread_cap() { return g_thread_cap; }
void set_thread_cap(int n) { g_thread_cap = n; }

int enumeration_cap() {
    if (g_enum_cap > 0) return g_enum_cap;
    if (const char* env = std::getenv("PLAQ_ENUM_CAP")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 28;
}
void set_enumeration_cap(int cap) { g_enum_cap = cap; }

int8_t BoundaryCondition::sign(Site s) const {
    switch (kind) {
        case BcKind::AllPlus: return 1;
        case BcKind::AllMinus: return -1;
        case BcKind::Free: throw std::runtime_error("free boundary condition queried for a spin value");
        case BcKind::Explicit: {
            auto it = values.find(s);
            if (it == values.end())
                throw std::runtime_error("explicit boundary condition missing site (" +
                                         std::to_string(s.x) + "," + std::to_string(s.y) + ")");
            return it->second;
        }
        case BcKind::Random: {
            uint64_t k = (uint64_t(uint32_t(s.x)) << 32) | uint32_t(s.y);
            return (rng::word(seed, 0xb07ULL, k) & 1) ? int8_t(1) : int8_t(-1);
        }
        case BcKind::Checkerboard: return ((s.x + s.y) & 1) == parity ? int8_t(-1) : int8_t(1);
        case BcKind::StripeH: return (s.y & 1) == parity ? int8_t(-1) : int8_t(1);
        default: return (s.x & 1) == parity ? int8_t(-1) : int8_t(1);
    }
}

std::string BoundaryCondition::name() const {
    switch (kind) {
        case BcKind::AllPlus: return "all-plus";
        case BcKind::AllMinus: return "all-minus";
        case BcKind::Free: return "free";
        case BcKind::Explicit: return "explicit";
        case BcKind::Random: return "random:" + std::to_string(seed);
        case BcKind::Checkerboard: return "checkerboard:" + std::to_string(parity);
        case BcKind::StripeH: return "stripe-h:" + std::to_string(parity);
        default: return "stripe-v:" + std::to_string(parity);
    }
}

std::vector<BoundaryCondition> declared_bc_family(uint64_t seed, int n_random) {
    std::vector<BoundaryCondition> fam = {
        BoundaryCondition::all_plus(),    BoundaryCondition::all_minus(),
        BoundaryCondition::checkerboard(0), BoundaryCondition::stripe_h(0),
        BoundaryCondition::stripe_h(1),   BoundaryCondition::stripe_v(0),
        BoundaryCondition::stripe_v(1),
    };
    for (int i = 0; i < n_random; ++i) fam.push_back(BoundaryCondition::random_bc(seed + uint64_t(i)));
    return fam;
}

EnumerationPlan EnumerationPlan::build(const GibbsSpec& spec) {
    if (spec.region.empty()) throw std::runtime_error("empty-region");
    if (int(spec.region.size()) > enumeration_cap()) throw std::runtime_error("too-large-for-enumeration");
    if (spec.mode == PlaqMode::meeting && spec.bc.is_free() && !spec.restricted)
        throw std::runtime_error("free-needs-inside-or-restricted");

    PlaqMode build_mode = spec.mode == PlaqMode::inside ? PlaqMode::inside
                        : spec.mode == PlaqMode::clipped ? PlaqMode::clipped
                                                         : PlaqMode::meeting;
    PlaquetteUniverse u = PlaquetteUniverse::build(spec.model, spec.region, build_mode);

    std::set<std::pair<int32_t, int32_t>> keep;
    if (spec.restricted) {
        PlaquetteUniverse inside = PlaquetteUniverse::build(spec.model, spec.region, PlaqMode::inside);
        for (Site b : *spec.restricted) {
            if (u.index_of_base(b) < 0)
                throw std::runtime_error("restricted family contains a plaquette outside B(region)");
            keep.insert({b.x, b.y});
        }
        for (const auto& p : inside.plaquettes)
            if (!keep.count({p.base.x, p.base.y}))
                throw std::runtime_error("restricted family must contain every inside plaquette");
    }

    EnumerationPlan plan;
    plan.nsites = int(spec.region.size());
    plan.sites = spec.region.sites();
    plan.site_to_plaqs.assign(size_t(plan.nsites), {});
    for (const auto& fp : u.plaquettes) {
        if (spec.restricted && !keep.count({fp.base.x, fp.base.y})) continue;
        Plaq p;
        p.site_idx = fp.region_site_idx;
        p.ext_sign = 1;
        for (Site s : fp.exterior_sites) {
            if (spec.bc.is_free())
                throw std::runtime_error("free-needs-inside-or-restricted");
            p.ext_sign = int8_t(p.ext_sign * spec.bc.sign(s));
        }
        int idx = int(plan.plaqs.size());
        for (int s : p.site_idx) plan.site_to_plaqs[size_t(s)].push_back(idx);
        plan.plaqs.push_back(std::move(p));
    }
    return plan;
}

namespace {

struct SumFG {
    long double z = 0, f = 0, g = 0, fg = 0;
};

// Blocked deterministic sweep accumulating Z and up to two observables.
SumFG blocked_sums(const GibbsSpec& spec, const Observable* f, const Observable* g) {
    EnumerationPlan plan = EnumerationPlan::build(spec);
    auto wt = detail::weight_table(int(plan.plaqs.size()), spec.beta);
    const int bb = detail::block_bits(plan.nsites);
    const int low = plan.nsites - bb;
    auto partial = run_blocks<SumFG>(1 << bb, [&](int block) {
        SumFG acc;
        Spins view;
        view.region = &spec.region;
        detail::enumerate_block(plan, wt, low, uint64_t(block), [&](const int8_t* s, double w, int, int) {
            acc.z += w;
            if (f || g) {
                view.s = s;
                double fv = f ? (*f)(view) : 0.0;
                double gv = g ? (*g)(view) : 0.0;
                if (f) acc.f += w * fv;
                if (g) acc.g += w * gv;
                if (f && g) acc.fg += w * fv * gv;
            }
        });
        return acc;
    });
    SumFG total;
    for (const auto& a : partial) {
        total.z += a.z;
        total.f += a.f;
        total.g += a.g;
        total.fg += a.fg;
    }
    return total;
}

}  // namespace

double log_partition_function(const GibbsSpec& spec) {
    EnumerationPlan plan = EnumerationPlan::build(spec);
    SumFG total = blocked_sums(spec, nullptr, nullptr);
    return spec.beta * double(plan.plaqs.size()) / 2.0 + double(std::log(total.z));
}

double expectation(const GibbsSpec& spec, const Observable& f) {
    SumFG t = blocked_sums(spec, &f, nullptr);
    return double(t.f / t.z);
}

CovResult covariance_full(const GibbsSpec& spec, const Observable& f, const Observable& g) {
    SumFG t = blocked_sums(spec, &f, &g);
    CovResult r;
    r.mean_f = double(t.f / t.z);
    r.mean_g = double(t.g / t.z);
    r.cov = double(t.fg / t.z) - r.mean_f * r.mean_g;
    return r;
}

double covariance(const GibbsSpec& spec, const Observable& f, const Observable& g) {
    return covariance_full(spec, f, g).cov;
}

double h_x(const GibbsSpec& spec, Site x, const SpinConfig& config) {
    if (spec.region.contains(x)) throw std::runtime_error("h_x: site lies inside the region");
    double s = 0;
    bool touches = false;
    for (Site o : spec.model.offsets()) {
        Site base = x - o;
        double p = 1;
        bool meets = false;
        for (Site t : plaquette_sites(spec.model, base)) {
            p *= config.spin(t);
            if (spec.region.contains(t)) meets = true;
        }
        touches |= meets;
        s += p;
    }
    if (!touches) throw std::runtime_error("h_x: no plaquette through x meets the region");
    return std::exp(-spec.beta * s);
}

Observable h_x_observable(const GibbsSpec& spec, Site x) {
    if (spec.region.contains(x)) throw std::runtime_error("h_x: site lies inside the region");
    struct Term {
        std::vector<int> idx;
        int8_t ext = 1;
    };
    auto terms = std::make_shared<std::vector<Term>>();
    double const_sum = 0;
    bool touches = false;
    for (Site o : spec.model.offsets()) {
        Site base = x - o;
        Term t;
        bool meets = false;
        for (Site s : plaquette_sites(spec.model, base)) {
            int idx = spec.region.index_of(s);
            if (idx >= 0) {
                t.idx.push_back(idx);
                meets = true;
            } else {
                t.ext = int8_t(t.ext * spec.bc.sign(s));
            }
        }
        if (meets) {
            touches = true;
            terms->push_back(std::move(t));
        } else {
            const_sum += t.ext;
        }
    }
    if (!touches) throw std::runtime_error("h_x: no plaquette through x meets the region");
    const double beta = spec.beta;
    return [terms, const_sum, beta](const Spins& sp) {
        double s = const_sum;
        for (const auto& t : *terms) {
            double p = t.ext;
            for (int i : t.idx) p *= sp.by_index(i);
            s += p;
        }
        return std::exp(-beta * s);
    };
}

// ---------------------------------------------------------------------------
// phi(ell) and the finite-size condition
// ---------------------------------------------------------------------------

namespace {

struct RingGeometry {
    Region region;                       // Q_ell
    PlaquetteUniverse u;                 // meeting family
    std::vector<Site> ring;              // exterior sites of the family, sorted
    std::unordered_map<Site, int, SiteHash> ring_idx;
    std::vector<std::vector<int>> plaq_ring;   // per plaquette: ring site ids
    std::vector<std::vector<int>> cand_plaqs;  // per ring site: meeting plaquettes through it
};

RingGeometry ring_geometry(const ModelSpec& model, int32_t ell) {
    RingGeometry g;
    g.region = Region::square(ell);
    g.u = PlaquetteUniverse::build(model, g.region, PlaqMode::meeting);
    SiteSet seen;
    for (const auto& p : g.u.plaquettes)
        for (Site s : p.exterior_sites) seen.insert(s);
    g.ring.assign(seen.begin(), seen.end());
    std::sort(g.ring.begin(), g.ring.end());
    for (int i = 0; i < int(g.ring.size()); ++i) g.ring_idx.emplace(g.ring[size_t(i)], i);
    g.plaq_ring.resize(g.u.size());
    g.cand_plaqs.resize(g.ring.size());
    for (int p = 0; p < int(g.u.size()); ++p)
        for (Site s : g.u.plaquettes[size_t(p)].exterior_sites) {
            int r = g.ring_idx.at(s);
            g.plaq_ring[size_t(p)].push_back(r);
            g.cand_plaqs[size_t(r)].push_back(p);
        }
    return g;
}

struct PairTable {
    int a = 0, b = 0;                 // candidate (ring) indices
    std::vector<int> rs;              // relevant ring sites
    std::vector<double> min_const;    // per RS pattern: min over extension sites of sum_B [tau]_B
};

// Disjoint plaquettes through ring site x: those reading only boundary spins.
// Their [tau]_B products scale Cov(h_x, h_y); the table holds, per pattern of
// the ring sites they touch, the minimum of the summed products over the free
// exterior sites beyond the ring.
PairTable build_pair_table(const ModelSpec& model, const RingGeometry& g, int a, int b) {
    PairTable t;
    t.a = a;
    t.b = b;
    struct DPlaq {
        std::vector<int> ring_sites;
        std::vector<int> ext_sites;  // ids into local ext list
    };
    std::vector<DPlaq> dp;
    std::vector<Site> ext;
    std::unordered_map<Site, int, SiteHash> ext_idx;
    std::set<int> rs_set;
    for (int cand : {a, b}) {
        Site x = g.ring[size_t(cand)];
        for (Site o : model.offsets()) {
            Site base = x - o;
            bool meets = false;
            for (Site s : plaquette_sites(model, base))
                if (g.region.contains(s)) meets = true;
            if (meets) continue;
            DPlaq d;
            for (Site s : plaquette_sites(model, base)) {
                auto it = g.ring_idx.find(s);
                if (it != g.ring_idx.end()) {
                    d.ring_sites.push_back(it->second);
                    rs_set.insert(it->second);
                } else {
                    auto [eit, fresh] = ext_idx.emplace(s, int(ext.size()));
                    if (fresh) ext.push_back(s);
                    d.ext_sites.push_back(eit->second);
                }
            }
            dp.push_back(std::move(d));
        }
    }
    t.rs.assign(rs_set.begin(), rs_set.end());
    std::unordered_map<int, int> rs_pos;
    for (int i = 0; i < int(t.rs.size()); ++i) rs_pos.emplace(t.rs[size_t(i)], i);

    const int nrs = int(t.rs.size());
    const int nex = int(ext.size());
    t.min_const.assign(size_t(1) << nrs, 0.0);
    for (uint64_t rp = 0; rp < (uint64_t(1) << nrs); ++rp) {
        double best = 1e300;
        for (uint64_t ep = 0; ep < (uint64_t(1) << nex); ++ep) {
            double sum = 0;
            for (const auto& d : dp) {
                int sgn = 1;
                for (int r : d.ring_sites) sgn *= ((rp >> rs_pos.at(r)) & 1) ? -1 : 1;
                for (int e : d.ext_sites) sgn *= ((ep >> e) & 1) ? -1 : 1;
                sum += sgn;
            }
            best = std::min(best, sum);
        }
        if (dp.empty()) best = 0;
        t.min_const[size_t(rp)] = best;
    }
    return t;
}

bool pair_admissible(Site x, Site y, int32_t ell) { return 4 * l1_distance(x, y) >= ell; }

PhiResult phi_exhaustive(const ModelSpec& model, int32_t ell, double beta, const RingGeometry& g) {
    const int nring = int(g.ring.size());
    const int ncand = nring;
    const int m = int(g.u.size());
    const int n = int(g.region.size());

    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < ncand; ++a)
        for (int b = a + 1; b < ncand; ++b)
            if (pair_admissible(g.ring[size_t(a)], g.ring[size_t(b)], ell)) pairs.push_back({a, b});
    std::vector<PairTable> tables;
    tables.reserve(pairs.size());
    for (auto [a, b] : pairs) tables.push_back(build_pair_table(model, g, a, b));

    // interior site -> plaquettes
    std::vector<std::vector<int>> site_to_plaqs(static_cast<size_t>(n));
    for (int p = 0; p < m; ++p)
        for (int s : g.u.plaquettes[size_t(p)].region_site_idx) site_to_plaqs[size_t(s)].push_back(p);

    auto wt = detail::weight_table(m, beta);
    const int psize = model.plaquette_size();
    const int soff = psize;                      // S-tilde values in [-psize, psize]
    const int swidth = 2 * psize + 1;
    const int poff = 2 * psize;
    const int pwidth = 4 * psize + 1;

    // per-candidate exp(-beta s) lookups
    std::vector<double> es(static_cast<size_t>(swidth)), eps(static_cast<size_t>(pwidth));
    for (int i = 0; i < swidth; ++i) es[size_t(i)] = std::exp(-beta * double(i - soff));
    for (int i = 0; i < pwidth; ++i) eps[size_t(i)] = std::exp(-beta * double(i - poff));

    const uint64_t ntau = uint64_t(1) << nring;
    const int nblocks = int(std::min<uint64_t>(64, ntau));
    const uint64_t per = ntau / uint64_t(nblocks);

    struct Best {
        double v = -1;
        int pair = -1;
    };
    auto partial = run_blocks<Best>(nblocks, [&](int blk) {
        Best best;
        std::vector<int8_t> spins(static_cast<size_t>(n));
        std::vector<int8_t> val(static_cast<size_t>(m));
        std::vector<int> stil(static_cast<size_t>(ncand));
        long double ztot = 0;
        std::vector<long double> single(size_t(ncand) * swidth);
        std::vector<long double> pacc(pairs.size() * size_t(pwidth));
        const uint64_t t0 = uint64_t(blk) * per;
        const uint64_t t1 = (blk == nblocks - 1) ? ntau : t0 + per;
        for (uint64_t tau = t0; tau < t1; ++tau) {
            // boundary signs for this tau
            std::fill(spins.begin(), spins.end(), int8_t(1));
            int energy = 0;
            std::fill(stil.begin(), stil.end(), 0);
            for (int p = 0; p < m; ++p) {
                int sgn = 1;
                for (int r : g.plaq_ring[size_t(p)]) sgn *= ((tau >> r) & 1) ? -1 : 1;
                val[size_t(p)] = int8_t(sgn);
                energy += sgn;
            }
            for (int c = 0; c < ncand; ++c)
                for (int p : g.cand_plaqs[size_t(c)]) stil[size_t(c)] += val[size_t(p)];

            ztot = 0;
            std::fill(single.begin(), single.end(), 0.0L);
            std::fill(pacc.begin(), pacc.end(), 0.0L);

            auto record = [&](double w) {
                ztot += w;
                for (int c = 0; c < ncand; ++c) single[size_t(c) * swidth + size_t(stil[size_t(c)] + soff)] += w;
                for (size_t q = 0; q < pairs.size(); ++q) {
                    int sv = stil[size_t(pairs[q].first)] + stil[size_t(pairs[q].second)] + poff;
                    pacc[q * size_t(pwidth) + size_t(sv)] += w;
                }
            };
            record(wt[size_t((energy + m) / 2)]);
            const uint64_t nconf = uint64_t(1) << n;
            for (uint64_t k = 1; k < nconf; ++k) {
                int sflip = std::countr_zero(k);
                spins[size_t(sflip)] = int8_t(-spins[size_t(sflip)]);
                for (int p : site_to_plaqs[size_t(sflip)]) {
                    int delta = -2 * val[size_t(p)];
                    energy += delta;
                    for (int r : g.plaq_ring[size_t(p)]) stil[size_t(r)] += delta;
                    val[size_t(p)] = int8_t(-val[size_t(p)]);
                }
                record(wt[size_t((energy + m) / 2)]);
            }

            const long double z = ztot;
            std::vector<double> eh(static_cast<size_t>(ncand));
            for (int c = 0; c < ncand; ++c) {
                long double s = 0;
                for (int i = 0; i < swidth; ++i) s += single[size_t(c) * swidth + size_t(i)] * es[size_t(i)];
                eh[size_t(c)] = double(s / z);
            }
            for (size_t q = 0; q < pairs.size(); ++q) {
                long double s = 0;
                for (int i = 0; i < pwidth; ++i) s += pacc[q * size_t(pwidth) + size_t(i)] * eps[size_t(i)];
                double cov = double(s / z) - eh[size_t(pairs[q].first)] * eh[size_t(pairs[q].second)];
                // constant scaling from plaquettes through x,y reading only
                // boundary spins, maximized over the free exterior sites
                const PairTable& tb = tables[q];
                uint64_t rp = 0;
                for (size_t i = 0; i < tb.rs.size(); ++i)
                    if ((tau >> tb.rs[i]) & 1) rp |= uint64_t(1) << i;
                double v = std::exp(-beta * tb.min_const[size_t(rp)]) * std::abs(cov);
                if (v > best.v) {
                    best.v = v;
                    best.pair = int(q);
                }
            }
        }
        return best;
    });

    Best best;
    for (const auto& b : partial)
        if (b.v > best.v) best = b;
    PhiResult res;
    res.value = std::max(0.0, best.v);
    res.exact = true;
    if (best.pair >= 0) {
        res.best_x = g.ring[size_t(pairs[size_t(best.pair)].first)];
        res.best_y = g.ring[size_t(pairs[size_t(best.pair)].second)];
    }
    return res;
}

PhiResult phi_family(const ModelSpec& model, int32_t ell, double beta, const RingGeometry& g,
                     const std::vector<BoundaryCondition>& family) {
    PhiResult res;
    res.exact = false;
    GibbsSpec spec{model, g.region, beta, BoundaryCondition::all_plus(), PlaqMode::meeting, std::nullopt};
    for (const auto& bc : family) {
        spec.bc = bc;
        for (size_t a = 0; a < g.ring.size(); ++a)
            for (size_t b = a + 1; b < g.ring.size(); ++b) {
                Site x = g.ring[a], y = g.ring[b];
                if (!pair_admissible(x, y, ell)) continue;
                double c = std::abs(covariance(spec, h_x_observable(spec, x), h_x_observable(spec, y)));
                if (c > res.value) {
                    res.value = c;
                    res.best_x = x;
                    res.best_y = y;
                }
            }
    }
    return res;
}

}  // namespace

PhiResult phi_ell(const ModelSpec& model, int32_t ell, double beta, const PhiOptions& opt) {
    RingGeometry g = ring_geometry(model, ell);
    if (beta == 0) {  // product measure: h_x constants have zero covariance
        PhiResult r;
        r.value = 0;
        r.exact = true;
        return r;
    }
    // The exhaustive boundary sup enumerates 2^|ring| assignments with a full
    // spin enumeration inside each: cap the combined exponent as well.
    if (opt.allow_exhaustive && int(g.ring.size()) <= opt.exhaustive_ring_cap &&
        int(g.region.size()) + int(g.ring.size()) <= 22)
        return phi_exhaustive(model, ell, beta, g);
    return phi_family(model, ell, beta, g, declared_bc_family(opt.family_seed, opt.family_random_members));
}

PhiResult sm_condition_value(const ModelSpec& model, int32_t ell, double beta, const PhiOptions& opt) {
    PhiResult r = phi_ell(model, ell, beta, opt);
    r.value *= std::exp(4.0 * beta * model.half_norm()) * double(ell);
    return r;
}

// ---------------------------------------------------------------------------
// total variation between V-marginals
// ---------------------------------------------------------------------------

namespace {

struct TvGeometry {
    Region lambda;
    std::vector<int> v_sites;  // indices of V inside lambda's order
};

TvGeometry tv_geometry(int32_t ell, int32_t R) {
    if (R < 3) throw std::invalid_argument("total variation marginal needs R >= 3");
    TvGeometry g;
    int32_t side = R * ell;
    g.lambda = Region::box({0, 0}, side, side);
    int32_t off = (side - ell) / 2;
    for (int32_t y = 0; y < ell; ++y)
        for (int32_t x = 0; x < ell; ++x) g.v_sites.push_back(g.lambda.index_of({off + x, off + y}));
    return g;
}

std::vector<double> marginal_on_v(const ModelSpec& model, const TvGeometry& g, double beta,
                                  const BoundaryCondition& tau) {
    GibbsSpec spec{model, g.lambda, beta, tau, PlaqMode::meeting, std::nullopt};
    EnumerationPlan plan = EnumerationPlan::build(spec);
    auto wt = detail::weight_table(int(plan.plaqs.size()), beta);
    const int bb = detail::block_bits(plan.nsites);
    const int low = plan.nsites - bb;
    const size_t nv = g.v_sites.size();
    auto partial = run_blocks<std::vector<long double>>(1 << bb, [&](int block) {
        std::vector<long double> acc(size_t(1) << nv, 0.0L);
        detail::enumerate_block(plan, wt, low, uint64_t(block), [&](const int8_t* s, double w, int, int) {
            uint32_t pat = 0;
            for (size_t i = 0; i < nv; ++i)
                if (s[g.v_sites[i]] < 0) pat |= uint32_t(1) << i;
            acc[pat] += w;
        });
        return acc;
    });
    std::vector<long double> tot(size_t(1) << nv, 0.0L);
    for (const auto& a : partial)
        for (size_t i = 0; i < tot.size(); ++i) tot[i] += a[i];
    long double z = 0;
    for (long double v : tot) z += v;
    std::vector<double> out(tot.size());
    for (size_t i = 0; i < tot.size(); ++i) out[i] = double(tot[i] / z);
    return out;
}

}  // namespace

double tv_marginal_exact(const ModelSpec& model, int32_t ell, int32_t R, double beta,
                         const BoundaryCondition& tau, const BoundaryCondition& tau2) {
    TvGeometry g = tv_geometry(ell, R);
    auto p = marginal_on_v(model, g, beta, tau);
    auto q = marginal_on_v(model, g, beta, tau2);
    double tv = 0;
    for (size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

TvSupResult tv_marginal_sup(const ModelSpec& model, int32_t ell, int32_t R, double beta,
                            uint64_t family_seed, int family_random_members, int exhaustive_ring_cap) {
    TvGeometry g = tv_geometry(ell, R);
    TvSupResult res;

    // Exhaustive sup over every boundary assignment: feasible for a single-site
    // V with a small ring. By global spin flip the sup equals max_tau m_c.
    if (ell == 1) {
        PlaquetteUniverse u = PlaquetteUniverse::build(model, g.lambda, PlaqMode::meeting);
        SiteSet ringset;
        for (const auto& p : u.plaquettes)
            for (Site s : p.exterior_sites) ringset.insert(s);
        std::vector<Site> ring(ringset.begin(), ringset.end());
        std::sort(ring.begin(), ring.end());
        if (int(ring.size()) <= exhaustive_ring_cap &&
            int(g.lambda.size()) + int(ring.size()) <= 26 &&
            int(g.lambda.size()) <= enumeration_cap()) {
            std::unordered_map<Site, int, SiteHash> ridx;
            for (int i = 0; i < int(ring.size()); ++i) ridx.emplace(ring[size_t(i)], i);
            const int m = int(u.size());
            const int n = int(g.lambda.size());
            std::vector<std::vector<int>> plaq_ring(static_cast<size_t>(m));
            for (int p = 0; p < m; ++p)
                for (Site s : u.plaquettes[size_t(p)].exterior_sites)
                    plaq_ring[size_t(p)].push_back(ridx.at(s));
            std::vector<std::vector<int>> site_to_plaqs(static_cast<size_t>(n));
            for (int p = 0; p < m; ++p)
                for (int s : u.plaquettes[size_t(p)].region_site_idx) site_to_plaqs[size_t(s)].push_back(p);
            auto wt = detail::weight_table(m, beta);
            const int center = g.v_sites[0];
            const uint64_t ntau = uint64_t(1) << ring.size();
            const int nblocks = int(std::min<uint64_t>(64, ntau));
            const uint64_t per = ntau / uint64_t(nblocks);
            auto partial = run_blocks<std::pair<double, double>>(nblocks, [&](int blk) {
                double mmax = -2, mmin = 2;
                std::vector<int8_t> spins(static_cast<size_t>(n));
                std::vector<int8_t> val(static_cast<size_t>(m));
                const uint64_t t0 = uint64_t(blk) * per;
                const uint64_t t1 = (blk == nblocks - 1) ? ntau : t0 + per;
                for (uint64_t tau = t0; tau < t1; ++tau) {
                    std::fill(spins.begin(), spins.end(), int8_t(1));
                    int energy = 0;
                    for (int p = 0; p < m; ++p) {
                        int sgn = 1;
                        for (int r : plaq_ring[size_t(p)]) sgn *= ((tau >> r) & 1) ? -1 : 1;
                        val[size_t(p)] = int8_t(sgn);
                        energy += sgn;
                    }
                    long double z = 0, zc = 0;
                    auto record = [&](double w, int8_t sc) {
                        z += w;
                        zc += w * sc;
                    };
                    record(wt[size_t((energy + m) / 2)], spins[size_t(center)]);
                    const uint64_t nconf = uint64_t(1) << n;
                    for (uint64_t k = 1; k < nconf; ++k) {
                        int sflip = std::countr_zero(k);
                        spins[size_t(sflip)] = int8_t(-spins[size_t(sflip)]);
                        for (int p : site_to_plaqs[size_t(sflip)]) {
                            energy -= 2 * val[size_t(p)];
                            val[size_t(p)] = int8_t(-val[size_t(p)]);
                        }
                        record(wt[size_t((energy + m) / 2)], spins[size_t(center)]);
                    }
                    double mval = double(zc / z);
                    mmax = std::max(mmax, mval);
                    mmin = std::min(mmin, mval);
                }
                return std::make_pair(mmax, mmin);
            });
            double mmax = -2, mmin = 2;
            for (auto [a, b] : partial) {
                mmax = std::max(mmax, a);
                mmin = std::min(mmin, b);
            }
            res.value = 0.5 * (mmax - mmin);
            res.exact = true;
            return res;
        }
    }

    // family fallback: pairwise exact TV over the declared family
    auto family = declared_bc_family(family_seed, family_random_members);
    std::vector<std::vector<double>> marg;
    marg.reserve(family.size());
    for (const auto& bc : family) marg.push_back(marginal_on_v(model, g, beta, bc));
    for (size_t i = 0; i < marg.size(); ++i)
        for (size_t j = i + 1; j < marg.size(); ++j) {
            double tv = 0;
            for (size_t k = 0; k < marg[i].size(); ++k) tv += std::abs(marg[i][k] - marg[j][k]);
            res.value = std::max(res.value, 0.5 * tv);
        }
    res.exact = false;
    return res;
}

}  // namespace plaq
