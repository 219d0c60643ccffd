#include "plaq/lengths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plaq/mcmc.hpp"

namespace plaq {

namespace {

// smallest integer l >= 1 with l^2 * log_t <= log_thr (both logs negative)
int64_t smallest_ell_square(double log_thr, double log_t) {
    if (log_t >= 0) throw std::invalid_argument("needs t < 1");
    double need = log_thr / log_t;  // l^2 >= need
    if (need <= 1) return 1;
    int64_t l = int64_t(std::ceil(std::sqrt(need) - 1e-12));
    while (double(l) * double(l) < need) ++l;
    while (l > 1 && double(l - 1) * double(l - 1) >= need) --l;
    return l;
}

// smallest k >= 0 with 3^k >= need
int32_t smallest_k_pow3(double need) {
    if (need <= 1) return 0;
    int32_t k = 0;
    double p = 1;
    while (p < need) {
        p *= 3;
        ++k;
        if (k > 62) throw std::runtime_error("pow3 scan overflow");
    }
    return k;
}

// Monte Carlo sup of the V-marginal total variation over the declared
// boundary family. The raw empirical TV is biased upward by sampling noise,
// so the estimated null-noise floor (what TV of two equal distributions would
// show) is subtracted; the result is clamped at zero. That keeps the cavity
// scan a genuine lower-bound estimator instead of a noise artifact.
double mcmc_tv_sup(const ModelSpec& model, double beta, int32_t ell, const CavityOptions& opt) {
    const int32_t side = opt.R * ell;
    const int32_t off = (side - ell) / 2;
    std::vector<Site> vsites;
    for (int32_t y = 0; y < ell; ++y)
        for (int32_t x = 0; x < ell; ++x) vsites.push_back({off + x, off + y});
    const size_t nstates = size_t(1) << vsites.size();
    auto family = declared_bc_family(opt.seed, opt.family_random_members);
    std::vector<std::vector<double>> marg;
    int64_t nsamples = std::max<int64_t>(1, opt.sweeps / 8);
    const int64_t thin = 8;  // sweeps between samples
    for (size_t f = 0; f < family.size(); ++f) {
        ChainSpec cs;
        cs.model = model;
        cs.width = cs.height = side;
        cs.beta = beta;
        cs.bc = family[f];
        cs.seed = opt.seed;
        cs.chain_id = 1000 + f;
        McChain chain(cs);
        chain.run_sweeps(opt.burnin);
        std::vector<double> counts(nstates, 0.0);
        for (int64_t s = 0; s < nsamples; ++s) {
            chain.run_sweeps(thin);
            uint32_t pat = 0;
            for (size_t i = 0; i < vsites.size(); ++i)
                if (chain.spin(vsites[i]) < 0) pat |= uint32_t(1) << i;
            counts[pat] += 1.0;
        }
        for (double& c : counts) c /= double(nsamples);
        marg.push_back(std::move(counts));
    }
    double psi = 0;
    const double half_sqrt_2_over_pi = 0.5 * std::sqrt(2.0 / 3.14159265358979323846);
    for (size_t i = 0; i < marg.size(); ++i)
        for (size_t j = i + 1; j < marg.size(); ++j) {
            double tv = 0, floor = 0;
            for (size_t k = 0; k < nstates; ++k) {
                tv += std::abs(marg[i][k] - marg[j][k]);
                double m = 0.5 * (marg[i][k] + marg[j][k]);
                floor += std::sqrt(2.0 * m * (1.0 - m) / double(nsamples));
            }
            psi = std::max(psi, std::max(0.0, 0.5 * tv - half_sqrt_2_over_pi * floor));
        }
    return psi;
}

}  // namespace

LengthEstimate ell_multispin(const ModelSpec& model, double beta, double threshold) {
    LengthEstimate est;
    est.kind = LengthKind::multispin;
    est.beta = beta;
    est.certainty = Certainty::bracket;
    if (beta <= 0) {
        est.lo = est.hi = 1;
        est.certainty = Certainty::exact;
        return est;
    }
    const double log_t = std::log(std::tanh(beta / 2.0));
    const double log_thr = std::log(threshold);
    // every nonempty equivalent set has n(A) >= 1, so once tanh(beta/2) is at
    // or below the threshold the scale is exactly 1
    if (log_t <= log_thr) {
        est.lo = est.hi = 1;
        est.certainty = Certainty::exact;
        return est;
    }
    const double need = log_thr / log_t;  // minimal decomposition size needed
    if (model.kind == Model::SPM) {
        est.lo = smallest_ell_square(log_thr, log_t);
        // hi: n(A) >= floor(l)^2/4 for any admissible A, i.e. l^2 >= 4*need
        est.hi = smallest_ell_square(log_thr * 4.0, log_t);
    } else if (model.kind == Model::TPM) {
        est.lo = int64_t(1) << smallest_k_pow3(need);
        // hi: n(A) >= 3^{k-1} with k = floor(log2 l): need 3^{k-1} >= need
        int32_t k = smallest_k_pow3(need) + 1;
        if (need <= 1) k = 0;
        est.hi = int64_t(1) << k;
    } else {
        throw std::invalid_argument("multispin length supports SPM and TPM");
    }
    if (est.lo <= 1 && est.hi <= 1) est.certainty = Certainty::exact;
    return est;
}

LengthEstimate ell_cavity_estimate(const ModelSpec& model, double beta, const CavityOptions& opt) {
    LengthEstimate est;
    est.kind = LengthKind::cavity;
    est.beta = beta;
    est.certainty = Certainty::lower_bound;
    if (beta <= 0) {
        est.lo = est.hi = 1;
        est.certainty = Certainty::exact;
        return est;
    }
    int64_t last_above = 0;
    for (int32_t ell = 1; ell <= opt.max_ell; ++ell) {
        double psi;
        const int64_t lam_sites = int64_t(opt.R) * ell * int64_t(opt.R) * ell;
        if (lam_sites <= enumeration_cap()) {
            psi = tv_marginal_sup(model, ell, opt.R, beta, opt.seed, opt.family_random_members).value;
        } else if (beta <= opt.mcmc_beta_cap && ell * ell <= 4) {
            psi = mcmc_tv_sup(model, beta, ell, opt);
        } else {
            break;  // no reliable estimate beyond this scale
        }
        if (psi > opt.u) last_above = ell;
    }
    est.lo = est.hi = last_above + 1;
    return est;
}

LengthEstimate ell_mix_estimate(const ModelSpec& model, double beta, const MixOptions& opt) {
    LengthEstimate est;
    est.kind = LengthKind::mix;
    est.beta = beta;
    if (beta <= 0) {
        est.lo = est.hi = 1;
        est.certainty = Certainty::exact;
        return est;
    }
    PhiOptions popt;
    popt.family_seed = opt.seed;
    popt.family_random_members = opt.family_random_members;
    bool all_exact = true;
    for (int32_t ell = 1; ell <= opt.max_ell; ++ell) {
        PhiResult r = sm_condition_value(model, ell, beta, popt);
        all_exact &= r.exact;
        if (r.value <= opt.eps0) {
            est.lo = est.hi = ell;
            est.certainty = all_exact ? Certainty::exact : Certainty::lower_bound;
            return est;
        }
    }
    est.lo = est.hi = opt.max_ell + 1;  // no crossing in the reachable window
    est.certainty = Certainty::lower_bound;
    return est;
}

int64_t renorm_length(const ModelSpec& model, double beta) {
    if (beta <= 0) return 1;
    const double log_s = std::log(std::tanh(beta / 2.0));
    const double log_target = std::log(std::tanh(0.5));  // beta' <= 1 <=> s^k <= tanh(1/2)
    if (model.kind == Model::SPM) return smallest_ell_square(log_target, log_s);
    if (model.kind == Model::TPM) return int64_t(1) << smallest_k_pow3(log_target / log_s);
    throw std::invalid_argument("renorm length supports SPM and TPM");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope needs matched series");
    double xm = 0, ym = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= double(x.size());
    ym /= double(y.size());
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - xm) * (y[i] - ym);
        sxx += (x[i] - xm) * (x[i] - xm);
    }
    return sxy / sxx;
}

double multispin_slope(const ModelSpec& model, double beta_lo, double beta_hi, double step,
                       double threshold) {
    std::vector<double> xs, ys;
    for (double b = beta_lo; b <= beta_hi + 1e-9; b += step) {
        xs.push_back(b);
        ys.push_back(std::log(double(ell_multispin(model, b, threshold).lo)));
    }
    return fit_slope(xs, ys);
}

double renorm_slope(const ModelSpec& model, double beta_lo, double beta_hi, double step) {
    std::vector<double> xs, ys;
    for (double b = beta_lo; b <= beta_hi + 1e-9; b += step) {
        xs.push_back(b);
        ys.push_back(std::log(double(renorm_length(model, b))));
    }
    return fit_slope(xs, ys);
}

std::vector<OrderingRow> ordering_report(const ModelSpec& model, const std::vector<double>& betas,
                                         const CavityOptions& copt, const MixOptions& mopt) {
    std::vector<OrderingRow> rows;
    for (double b : betas) {
        OrderingRow row;
        row.beta = b;
        row.multispin = ell_multispin(model, b);
        row.cavity = ell_cavity_estimate(model, b, copt);
        row.mix = ell_mix_estimate(model, b, mopt);
        row.renorm = renorm_length(model, b);
        row.ordering_ok = row.multispin.lo <= row.cavity.lo;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace plaq
