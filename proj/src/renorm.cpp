#include "plaq/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plaq/enumerate.hpp"
#include "plaq/parallel.hpp"
#include "plaq/rng.hpp"
#include "plaq/shadows.hpp"

namespace plaq {

double q_of_beta(double beta) {
    if (beta < 0) throw std::invalid_argument("q_of_beta needs beta >= 0");
    return 1.0 / (1.0 + std::exp(beta));
}

double beta_of_q(double q) {
    if (!(q > 0) || q > 0.5) throw std::invalid_argument("beta_of_q needs q in (0, 1/2]");
    return std::log((1.0 - q) / q);
}

double phi_q_k(double q, double k) {
    if (q < 0 || q > 0.5 || k < 1) throw std::invalid_argument("phi_q_k needs q in [0,1/2], k >= 1");
    return 0.5 - 0.5 * std::pow(1.0 - 2.0 * q, k);
}

RenormSpec RenormSpec::spm(int32_t ell) {
    if (ell < 1) throw std::invalid_argument("SPM decimation step must be positive");
    return {ModelSpec::spm(), ell, 0};
}
RenormSpec RenormSpec::tpm_n(int32_t n) {
    if (n < 0 || n > 40) throw std::invalid_argument("TPM decimation exponent out of range");
    return {ModelSpec::tpm(), n <= 30 ? (1 << n) : 0, n};
}
RenormSpec RenormSpec::tpm_ell(int32_t ell) {
    if (ell < 1 || (ell & (ell - 1)) != 0)
        throw std::invalid_argument("TPM decimation step must be a power of two");
    int32_t n = 0;
    while ((1 << n) < ell) ++n;
    return tpm_n(n);
}

long double RenormSpec::k() const {
    if (model.kind == Model::SPM) return (long double)ell * ell;
    long double k = 1;
    for (int32_t i = 0; i < n; ++i) k *= 3;
    return k;
}

BetaPrime beta_prime(double beta, const RenormSpec& spec) {
    if (!(beta > 0)) throw std::invalid_argument("beta_prime needs beta > 0");
    BetaPrime out;
    const long double k = spec.k();
    // s = 1 - 2q(beta) = tanh(beta/2); beta' = log((1+s^k)/(1-s^k))
    const long double log_s = std::log((long double)std::tanh(beta / 2.0));
    const long double log_sk = k * log_s;
    if (log_sk < -745.0L) {  // s^k underflows double
        long double lb = std::log(2.0L) + log_sk;  // log of the asymptotic 2 s^k
        out.linearized = true;
        out.value = double(std::exp(lb));
        out.exact_zero = (out.value == 0.0);
        return out;
    }
    const long double sk = std::exp(log_sk);
    out.value = double(std::log1p(sk) - std::log1p(-sk));
    out.exact_zero = (out.value == 0.0);
    return out;
}

int8_t renormalized_plaquette(const ModelSpec& model, const std::function<int8_t(Site)>& spin,
                              Site x, int32_t scale) {
    int8_t p = 1;
    for (Site o : model.offsets()) p = int8_t(p * spin({x.x + scale * o.x, x.y + scale * o.y}));
    return p;
}

std::vector<int8_t> spm_reconstruct(int32_t side, const std::function<int8_t(Site)>& boundary,
                                    const std::function<int8_t(Site)>& plaq_var) {
    std::vector<int8_t> s(size_t(side) * side);
    auto at = [&](int32_t x, int32_t y) -> int8_t& { return s[size_t(y) * side + x]; };
    for (int32_t x = 0; x < side; ++x) at(x, 0) = boundary({x, 0});
    for (int32_t y = 1; y < side; ++y) at(0, y) = boundary({0, y});
    for (int32_t y = 1; y < side; ++y)
        for (int32_t x = 1; x < side; ++x)
            at(x, y) = int8_t(plaq_var({x - 1, y - 1}) * at(x - 1, y - 1) * at(x, y - 1) * at(x - 1, y));
    return s;
}

std::vector<int8_t> tpm_reconstruct(int32_t m, const Region& tri, const std::function<int8_t(Site)>& west,
                                    const std::function<int8_t(Site)>& plaq_var) {
    std::vector<int8_t> s(tri.size());
    for (int32_t y = 0; y <= m; ++y) s[size_t(tri.index_of({0, y}))] = west({0, y});
    for (int32_t a = 0; a + 1 <= m; ++a)
        for (int32_t b = a; b + 1 <= m; ++b) {
            int8_t v = int8_t(plaq_var({a, b}) * s[size_t(tri.index_of({a, b}))] *
                              s[size_t(tri.index_of({a, b + 1}))]);
            s[size_t(tri.index_of({a + 1, b + 1}))] = v;
        }
    return s;
}

FreeGibbsSampler::FreeGibbsSampler(const ModelSpec& model, int32_t ell_or_n, int32_t N, double beta,
                                   uint64_t seed)
    : model_(model), q_(q_of_beta(beta)), seed_(seed) {
    if (model.kind == Model::SPM) {
        side_ = ell_or_n * N + 1;
        region_ = Region::spm_block(ell_or_n, N);
        for (int32_t y = 0; y + 1 < side_; ++y)
            for (int32_t x = 0; x + 1 < side_; ++x) bases_.push_back({x, y});
        for (int32_t x = 0; x < side_; ++x) boundary_.push_back({x, 0});
        for (int32_t y = 1; y < side_; ++y) boundary_.push_back({0, y});
    } else if (model.kind == Model::TPM) {
        side_ = 1 << (ell_or_n + N);
        region_ = Region::decimation_triangle(ell_or_n, N);
        for (int32_t b = 0; b + 1 <= side_; ++b)
            for (int32_t a = 0; a <= b; ++a) bases_.push_back({a, b});
        for (int32_t y = 0; y <= side_; ++y) boundary_.push_back({0, y});
    } else {
        throw std::invalid_argument("free-boundary product sampler supports SPM and TPM only");
    }
}

SpinConfig FreeGibbsSampler::sample(uint64_t sample_index) const {
    rng::Stream stream(seed_, sample_index);
    std::unordered_map<Site, int8_t, SiteHash> bval;
    for (Site b : boundary_) bval.emplace(b, stream.next_sign());
    std::unordered_map<Site, int8_t, SiteHash> pval;
    for (Site p : bases_) pval.emplace(p, stream.next_bernoulli(q_) ? int8_t(-1) : int8_t(1));

    auto bfun = [&](Site s) { return bval.at(s); };
    auto pfun = [&](Site s) { return pval.at(s); };
    SpinConfig cfg;
    cfg.region = region_;
    cfg.bc = BoundaryCondition::free_bc();
    if (model_.kind == Model::SPM) {
        std::vector<int8_t> grid = spm_reconstruct(side_, bfun, pfun);
        cfg.interior.resize(region_.size());
        for (size_t i = 0; i < region_.size(); ++i) {
            Site s = region_.site(int(i));
            cfg.interior[i] = grid[size_t(s.y) * side_ + s.x];
        }
    } else {
        cfg.interior = tpm_reconstruct(side_, region_, bfun, pfun);
    }
    // reconstruction contract: the plaquette variables of the rebuilt
    // configuration equal the sampled ones
    for (Site b : bases_) {
        int8_t v = 1;
        for (Site o : model_.offsets()) v = int8_t(v * cfg.interior[size_t(region_.index_of(b + o))]);
        if (v != pval.at(b)) throw std::logic_error("sampler reconstruction mismatch");
    }
    return cfg;
}

DecimationReport decimation_check(const ModelSpec& model, int32_t ell_or_n, int32_t N, double beta) {
    DecimationReport rep;
    rep.beta = beta;

    RenormSpec rs = model.kind == Model::SPM ? RenormSpec::spm(ell_or_n) : RenormSpec::tpm_n(ell_or_n);
    rep.beta_prime = beta > 0 ? beta_prime(beta, rs).value : 0.0;

    const int32_t step = model.kind == Model::SPM ? ell_or_n : (1 << ell_or_n);
    Region fine = model.kind == Model::SPM ? Region::spm_block(ell_or_n, N)
                                           : Region::decimation_triangle(ell_or_n, N);
    Region coarse = model.kind == Model::SPM ? Region::spm_block(1, N) : Region::decimation_triangle(0, N);

    // decimated sites of the fine region, in sorted order; their order matches
    // the coarse region's order under (x,y) -> (x/step, y/step)
    std::vector<int> vsites;
    for (int i = 0; i < int(fine.size()); ++i) {
        Site s = fine.site(i);
        if (s.x % step == 0 && s.y % step == 0) vsites.push_back(i);
    }
    if (vsites.size() != coarse.size()) throw std::logic_error("decimated site count mismatch");
    const size_t nv = vsites.size();
    if (nv > 25) throw std::runtime_error("too-large-for-enumeration");
    rep.coarse_states = int64_t(1) << nv;

    // fine-side marginal by full enumeration of the free-boundary measure
    GibbsSpec fine_spec{model, fine, beta, BoundaryCondition::free_bc(), PlaqMode::inside, std::nullopt};
    EnumerationPlan plan = EnumerationPlan::build(fine_spec);
    auto wt = detail::weight_table(int(plan.plaqs.size()), beta);
    const int bb = detail::block_bits(plan.nsites);
    const int low = plan.nsites - bb;
    std::vector<int> site_to_bit(size_t(plan.nsites), -1);
    for (size_t i = 0; i < nv; ++i) site_to_bit[size_t(vsites[i])] = int(i);
    auto partial = run_blocks<std::vector<long double>>(1 << bb, [&](int block) {
        std::vector<long double> acc(size_t(1) << nv, 0.0L);
        uint32_t pat = 0;  // decimated-site pattern, tracked incrementally
        detail::enumerate_block(plan, wt, low, uint64_t(block), [&](const int8_t* s, double w, int, int flipped) {
            if (flipped < 0) {
                pat = 0;
                for (size_t i = 0; i < nv; ++i)
                    if (s[vsites[i]] < 0) pat |= uint32_t(1) << i;
            } else if (int b = site_to_bit[size_t(flipped)]; b >= 0) {
                pat ^= uint32_t(1) << b;
            }
            acc[pat] += w;
        });
        return acc;
    });
    std::vector<long double> fine_marg(size_t(1) << nv, 0.0L);
    for (const auto& a : partial)
        for (size_t i = 0; i < fine_marg.size(); ++i) fine_marg[i] += a[i];
    long double zf = 0;
    for (long double v : fine_marg) zf += v;

    // coarse side at beta'
    GibbsSpec coarse_spec{model, coarse, rep.beta_prime, BoundaryCondition::free_bc(), PlaqMode::inside,
                          std::nullopt};
    EnumerationPlan cplan = EnumerationPlan::build(coarse_spec);
    auto cwt = detail::weight_table(int(cplan.plaqs.size()), rep.beta_prime);
    std::vector<long double> coarse_marg(size_t(1) << nv, 0.0L);
    detail::enumerate_block(cplan, cwt, cplan.nsites, 0, [&](const int8_t* s, double w, int, int) {
        uint32_t pat = 0;
        for (size_t i = 0; i < nv; ++i)
            if (s[i] < 0) pat |= uint32_t(1) << i;
        coarse_marg[pat] += w;
    });
    long double zc = 0;
    for (long double v : coarse_marg) zc += v;

    double maxd = 0;
    for (size_t i = 0; i < fine_marg.size(); ++i)
        maxd = std::max(maxd, std::abs(double(fine_marg[i] / zf - coarse_marg[i] / zc)));
    rep.max_discrepancy = maxd;
    return rep;
}

std::vector<Site> tpm_flip_set(int32_t i, Site anchor) {
    if (i < 0 || i > 12) throw std::invalid_argument("tpm_flip_set index out of range");
    std::vector<Site> t = {{0, 0}, {1, 0}, {1, 1}};
    int32_t ell = 1;
    for (int32_t k = 0; k < i; ++k) {
        std::vector<Site> next = t;
        for (Site s : t) next.push_back({s.x + ell + 1, s.y});
        for (Site s : t) next.push_back({s.x + ell + 1, s.y + ell + 1});
        t = std::move(next);
        ell = 2 * ell + 1;
    }
    for (Site& s : t) s = s + anchor;
    std::sort(t.begin(), t.end());
    return t;
}

int32_t tpm_flip_ell(int32_t i) { return (1 << (i + 1)) - 1; }

std::vector<Site> flipped_plaquette_bases(const ModelSpec& model, const std::vector<Site>& sites) {
    SiteSet odd;
    for (Site s : sites)
        for (Site o : model.offsets()) {
            Site b = s - o;
            auto it = odd.find(b);
            if (it == odd.end())
                odd.insert(b);
            else
                odd.erase(it);
        }
    std::vector<Site> out(odd.begin(), odd.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace plaq
