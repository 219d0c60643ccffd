#include "plaq/magnetization.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plaq/gibbs.hpp"

namespace plaq {

namespace {

double log_binom(int64_t n, int64_t k) {
    return std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) - std::lgamma(double(n - k) + 1);
}

// Streaming log-sum-exp.
struct LogSum {
    double mx = -1e300;
    long double acc = 0;
    void add(double logv) {
        if (logv <= -1e290) return;
        if (logv > mx) {
            acc = acc * std::exp((long double)(mx - logv)) + 1.0L;
            mx = logv;
        } else {
            acc += std::exp((long double)(logv - mx));
        }
    }
    double value() const { return mx + double(std::log(acc)); }
};

// log(e^a + e^b)
double log_add(double a, double b) {
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

MagnetizationResult magnetization_plus_exact(int32_t ell, double beta) {
    if (ell < 1) throw std::invalid_argument("magnetization needs ell >= 1");
    MagnetizationResult r;
    r.ell = ell;
    r.beta = beta;
    r.L = 2 * int64_t(ell) + 2;
    const int64_t L = r.L, M = L / 2;
    const double lnt = std::log(std::tanh(beta / 2.0));

    // D = sum_i C(L,i) (t^i + t^{L-i})^L ; the i <-> L-i symmetry of the
    // summand is exploited (and relied upon) below.
    LogSum den;
    for (int64_t i = 0; i <= L / 2; ++i) {
        double inner = log_add(double(i) * lnt, double(L - i) * lnt);
        double term = log_binom(L, i) + double(L) * inner;
        den.add(term);
        if (i != L - i) den.add(term);  // the mirrored index gives the same term
    }
    r.log_den = den.value();

    // N = t^{L^2/4} sum_{u,v} C(M,u) C(M,v) (t^{2u}+t^{2v}+t^{L-2u}+t^{L-2v})^M,
    // symmetric in (u,v): sum the triangle u <= v and double the off-diagonal.
    std::vector<double> g(size_t(M) + 1), lb(size_t(M) + 1);
    for (int64_t u = 0; u <= M; ++u) {
        g[size_t(u)] = log_add(double(2 * u) * lnt, double(L - 2 * u) * lnt);
        lb[size_t(u)] = log_binom(M, u);
    }
    LogSum num;
    for (int64_t u = 0; u <= M; ++u) {
        for (int64_t v = u; v <= M; ++v) {
            double term = lb[size_t(u)] + lb[size_t(v)] + double(M) * log_add(g[size_t(u)], g[size_t(v)]);
            num.add(term);
            if (u != v) num.add(term);
        }
    }
    r.log_num = double(L) * double(L) / 4.0 * lnt + num.value();
    r.value = std::exp(r.log_num - r.log_den);
    return r;
}

MagnetizationResult magnetization_brute_force(int32_t ell, double beta) {
    if (ell != 1) throw std::invalid_argument("brute-force magnetization supports ell = 1 only");
    MagnetizationResult r;
    r.ell = ell;
    r.beta = beta;
    r.L = 4;
    r.brute_force = true;
    Region box = Region::centered_square(1);
    GibbsSpec spec{ModelSpec::spm(), box, beta, BoundaryCondition::all_plus(), PlaqMode::meeting, std::nullopt};
    int center = box.index_of({0, 0});
    r.value = expectation(spec, [center](const Spins& s) { return double(s.by_index(center)); });
    return r;
}

DecayScan magnetization_decay_scan(double beta, const std::vector<int64_t>& ells, double threshold) {
    DecayScan scan;
    for (int64_t ell : ells) {
        MagnetizationResult r = magnetization_plus_exact(int32_t(ell), beta);
        scan.rows.push_back({ell, r.value});
        // the value always lies in (0,1], so a threshold above 1 can never be
        // crossed from above; report no crossover rather than the first row
        if (!scan.crossover && threshold <= 1.0 && r.value < threshold) scan.crossover = ell;
    }
    return scan;
}

}  // namespace plaq
