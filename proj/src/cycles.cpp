#include "plaq/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace plaq {

bool is_cycle(const PlaquetteUniverse& u, const ParitySet& alpha) {
    std::vector<uint8_t> parity(u.region.size(), 0);
    bool ok = true;
    alpha.for_each_set([&](int p) {
        for (int s : u.plaquettes[size_t(p)].region_site_idx) parity[size_t(s)] ^= 1;
    });
    for (uint8_t b : parity) ok &= (b == 0);
    return ok;
}

namespace {

int count_rank(CycleBasis& b) {
    f2::Eliminator elim(int(b.universe.size()), int(b.generators.size()));
    for (size_t i = 0; i < b.generators.size(); ++i) elim.add(b.generators[i], int(i));
    b.rank = elim.rank();
    b.relations = int(b.generators.size()) - b.rank;
    return b.rank;
}

}  // namespace

CycleBasis spm_stripe_basis(int32_t n) {
    if (n < 1) throw std::invalid_argument("spm_stripe_basis needs n >= 1");
    CycleBasis b;
    // region [n]^2 = {1..n}^2; meeting bases are {0..n}^2
    b.universe = PlaquetteUniverse::build(ModelSpec::spm(), Region::square(n), PlaqMode::meeting);
    const int nb = int(b.universe.size());
    for (int32_t j = 0; j <= n; ++j) {  // horizontal stripes H_j
        ParitySet h(nb);
        for (int32_t k = 0; k <= n; ++k) {
            int idx = b.universe.index_of_base({k, j});
            if (idx < 0) throw std::logic_error("stripe base missing from universe");
            h.set(idx);
        }
        b.generators.push_back(std::move(h));
    }
    for (int32_t j = 0; j <= n; ++j) {  // vertical stripes V_j
        ParitySet v(nb);
        for (int32_t k = 0; k <= n; ++k) v.set(b.universe.index_of_base({j, k}));
        b.generators.push_back(std::move(v));
    }
    b.provenance = "SPM-stripes";
    count_rank(b);
    return b;
}

CycleBasis tpm_pascal_basis(int32_t n) {
    CycleBasis b;
    b.universe = PlaquetteUniverse::build(ModelSpec::tpm(), Region::triangle(n), PlaqMode::meeting);
    const int nb = int(b.universe.size());
    for (int32_t i = -1; i <= n; ++i) {
        ParitySet p(nb);
        for (int j = 0; j < nb; ++j) {
            Site z = b.universe.plaquettes[size_t(j)].base;
            if (pascal_parity(z.y + 1, z.x - i)) p.set(j);
        }
        b.generators.push_back(std::move(p));
    }
    b.provenance = "TPM-pascal";
    count_rank(b);
    return b;
}

CycleBasis plus_bc_generators(int32_t ell) {
    if (ell < 1) throw std::invalid_argument("plus_bc_generators needs ell >= 1");
    CycleBasis b;
    b.universe = PlaquetteUniverse::build(ModelSpec::spm(), Region::centered_square(ell), PlaqMode::clipped);
    const int nb = int(b.universe.size());
    const int32_t L = 2 * ell + 2;
    if (nb != L * L) throw std::logic_error("unexpected clipped universe size");
    for (int32_t i = 0; i < L; ++i) {  // row cycles R_i: base y = -ell-1+i
        ParitySet r(nb);
        for (int32_t u = -ell - 1; u <= ell; ++u) r.set(b.universe.index_of_base({u, -ell - 1 + i}));
        b.generators.push_back(std::move(r));
    }
    for (int32_t j = 0; j < L; ++j) {  // column cycles C_j: base x = -ell-1+j
        ParitySet c(nb);
        for (int32_t v = -ell - 1; v <= ell; ++v) c.set(b.universe.index_of_base({-ell - 1 + j, v}));
        b.generators.push_back(std::move(c));
    }
    b.provenance = "plus-bc-rows-cols";
    count_rank(b);
    return b;
}

std::optional<std::vector<uint8_t>> decompose(const ParitySet& alpha, const CycleBasis& basis) {
    f2::Eliminator elim(int(basis.universe.size()), int(basis.generators.size()));
    for (size_t i = 0; i < basis.generators.size(); ++i) elim.add(basis.generators[i], int(i));
    auto combo = elim.solve(alpha);
    if (!combo) return std::nullopt;
    std::vector<uint8_t> coeff(basis.generators.size(), 0);
    combo->for_each_set([&](int i) { coeff[size_t(i)] = 1; });
    return coeff;
}

double weighted_cycle_sum(const CycleBasis& basis, double t, bool skip_empty) {
    if (basis.generators.size() > 24) throw std::runtime_error("generator count above enumeration cap; use a Monte Carlo estimator");
    auto gens = f2::independent_subset(basis.generators, int(basis.universe.size()));
    std::vector<long double> tp(basis.universe.size() + 1);
    tp[0] = 1;
    for (size_t i = 1; i < tp.size(); ++i) tp[i] = tp[i - 1] * (long double)t;
    long double sum = 0;
    bool first = true;
    f2::enumerate_span(gens, int(basis.universe.size()), [&](const ParitySet&, int pc) {
        if (first) {
            first = false;  // zero vector comes first
            if (skip_empty) return;
        }
        sum += tp[size_t(pc)];
    });
    return double(sum);
}

double cycle_sum_bound(int32_t n, double t) {
    return std::expm1(2.0 * (n + 2) * std::pow(t, (n + 1) / 3.0));
}

std::vector<ParitySet> cycle_space_basis(const PlaquetteUniverse& u) {
    const int nsites = int(u.region.size());
    f2::Eliminator elim(nsites, int(u.size()));
    std::vector<ParitySet> basis;
    for (size_t p = 0; p < u.size(); ++p) {
        f2::Bitset v(nsites);
        for (int s : u.plaquettes[p].region_site_idx) v.flip(s);
        elim.add(v, int(p));
    }
    for (const auto& rel : elim.relations()) basis.push_back(rel);
    return basis;  // bitsets over plaquette indices
}

StaircaseProduct staircase_product_check(const std::vector<std::vector<int64_t>>& sets, double c) {
    StaircaseProduct res;
    const size_t m = sets.size();
    if (m > 16) throw std::invalid_argument("staircase_product_check caps at m = 16 sets");

    // staircase condition (each set contributes a fresh element)
    res.staircase_ok = true;
    {
        std::unordered_set<int64_t> seen;
        for (const auto& A : sets) {
            bool fresh = false;
            for (int64_t e : A)
                if (!seen.count(e)) fresh = true;
            if (A.empty() || !fresh) res.staircase_ok = false;
            for (int64_t e : A) seen.insert(e);
        }
    }

    // compress the universe
    std::vector<int64_t> universe;
    for (const auto& A : sets) universe.insert(universe.end(), A.begin(), A.end());
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    if (universe.size() > 24) throw std::invalid_argument("staircase_product_check universe above 24 elements");
    std::vector<uint32_t> masks(m, 0);
    for (size_t k = 0; k < m; ++k)
        for (int64_t e : sets[k]) {
            size_t pos = size_t(std::lower_bound(universe.begin(), universe.end(), e) - universe.begin());
            masks[k] |= uint32_t(1) << pos;
        }

    const uint64_t total = uint64_t(1) << universe.size();
    long double acc = 0;
    for (uint64_t sigma = 0; sigma < total; ++sigma) {
        // bit set = spin -1; [sigma]_A = -1 iff |A ∩ minus-set| odd
        int hits = 0;
        for (size_t k = 0; k < m; ++k) hits += std::popcount(uint64_t(masks[k] & sigma)) & 1;
        acc += std::exp((long double)c * hits);
    }
    res.lhs = double(acc / (long double)total);
    res.rhs = std::pow((std::exp(c) + 1.0) / 2.0, double(m));
    return res;
}

int64_t alpha_W_cardinality(int32_t ell, int32_t i, int32_t j) {
    const int64_t L = 2 * int64_t(ell) + 2;
    if (i < 0 || j < 0 || i > L || j > L) throw std::invalid_argument("alpha_W_cardinality: counts must lie in [0, 2l+2]");
    return (int64_t(i) + j) * L - 2 * int64_t(i) * j;
}

int64_t alpha_W_delta_cardinality(int32_t ell, int32_t u, int32_t v, int32_t j, int32_t k) {
    const int64_t L = 2 * int64_t(ell) + 2;
    const int64_t M = L / 2;
    for (int32_t p : {u, v, j, k})
        if (p < 0 || p > M) throw std::invalid_argument("alpha_W_delta_cardinality: counts must lie in [0, l+1]");
    // |alpha(W)| - 2|alpha(W) ∩ alpha_*| + |alpha_*|; alpha_* sits on the
    // group-u rows and group-k columns.
    return M * M + int64_t(j) * L + int64_t(v) * L - 2 * int64_t(v) * j - 2 * int64_t(u) * j -
           2 * int64_t(v) * k + 2 * int64_t(u) * k;
}

TwoRouteSum generator_subset_sum_check(int32_t ell, const std::function<double(const ParitySet&)>& f) {
    if (ell > 2) throw std::runtime_error("generator_subset_sum_check caps at ell = 2");
    TwoRouteSum res;
    CycleBasis g = plus_bc_generators(ell);

    // lhs over K+(Lambda) from an independent cycle-space basis
    auto kbasis = cycle_space_basis(g.universe);
    long double lhs = 0;
    f2::enumerate_span(kbasis, int(g.universe.size()), [&](const ParitySet& a, int) { lhs += f(a); });
    res.lhs = double(lhs);

    // rhs over all subsets W of G
    long double rhs = 0;
    ParitySet cur(int(g.universe.size()));
    rhs += f(cur);
    const uint64_t total = uint64_t(1) << g.generators.size();
    for (uint64_t i = 1; i < total; ++i) {
        int bit = std::countr_zero(i);
        cur ^= g.generators[size_t(bit)];
        rhs += f(cur);
    }
    res.rhs = double(rhs / 2.0L);
    return res;
}

std::vector<int32_t> a_of_z(int32_t n, Site z) {
    if (z.y < -1 || z.y > z.x || z.x > n) throw std::invalid_argument("a_of_z: z outside T^(n)");
    std::vector<int32_t> out;
    for (int32_t j = -1; j <= n; ++j)
        if (pascal_parity(z.y + 1, z.x - j)) out.push_back(j);
    return out;
}

}  // namespace plaq
