#include "plaq/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "plaq/cycles.hpp"
#include "plaq/f2.hpp"
#include "plaq/gibbs.hpp"
#include "plaq/shadows.hpp"

namespace plaq {

MultispinInfinite multispin_infinite(const ModelSpec& model, const std::vector<Site>& A, double beta) {
    MultispinInfinite r;
    auto dec = minimal_decomposition(model, A);
    if (!dec) {
        r.equivalent = false;
        r.value = 0;
        return r;
    }
    r.equivalent = true;
    r.n = int64_t(dec->size());
    double t = std::tanh(beta / 2.0);
    if (r.n == 0) {
        r.value = 1;
        r.log_value = 0;
        return r;
    }
    r.log_value = double(r.n) * std::log(t);
    r.value = std::exp(r.log_value);
    return r;
}

namespace {

// Clipped-plaquette representation of A over B+(Lambda) by elimination;
// lighter plaquettes feed first. The cycle walk later minimizes over the
// whole coset, so this only needs to find some representation.
f2::Bitset alpha_of_A(const PlaquetteUniverse& u, const Region& box, const std::vector<Site>& A) {
    const int nsites = int(box.size());
    std::vector<int> order(u.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return u.plaquettes[size_t(a)].region_site_idx.size() < u.plaquettes[size_t(b)].region_site_idx.size();
    });
    f2::Eliminator elim(nsites, int(u.size()));
    for (int p : order) {
        f2::Bitset v(nsites);
        for (int s : u.plaquettes[size_t(p)].region_site_idx) v.flip(s);
        elim.add(v, p);
    }
    f2::Bitset target(nsites);
    for (Site s : A) {
        int idx = box.index_of(s);
        if (idx < 0) throw std::runtime_error("multispin_plus_finite: A must lie inside the box");
        target.flip(idx);
    }
    auto combo = elim.solve(target);
    if (!combo) {
        // report the F2 residual: reduce the target by the row space
        f2::Bitset residual = target;
        for (const auto& row : elim.rows()) {
            int pivot = row.lowest_set();
            if (pivot >= 0 && residual.test(pivot)) residual ^= row;
        }
        std::ostringstream os;
        os << "A is not a sum of clipped plaquettes; residual sites:";
        residual.for_each_set([&](int i) { os << " (" << box.site(i).x << "," << box.site(i).y << ")"; });
        throw std::runtime_error(os.str());
    }
    return *combo;
}

}  // namespace

MultispinFinite multispin_plus_finite(const ModelSpec& model, const Region& box, const std::vector<Site>& A,
                                      double beta, FiniteMethod method) {
    MultispinFinite r;
    r.method = method;
    PlaquetteUniverse u = PlaquetteUniverse::build(model, box, PlaqMode::clipped);
    f2::Bitset alpha_a = alpha_of_A(u, box, A);

    // A clipped plaquette carrying m merged duplicates contributes
    // e^{(beta/2) m [sigma]} = cosh(beta m/2)(1 + tanh(beta m/2)[sigma]), so
    // the expansion weight is per-plaquette: t_B = tanh(beta m_B / 2).
    const int nb = int(u.size());
    std::vector<double> tB(static_cast<size_t>(nb));
    bool uniform = true;
    for (int i = 0; i < nb; ++i) {
        int m = u.plaquettes[size_t(i)].multiplicity;
        tB[size_t(i)] = std::tanh(beta * m / 2.0);
        uniform &= (m == 1);
    }
    const double t = std::tanh(beta / 2.0);

    auto kbasis = cycle_space_basis(u);
    if (kbasis.size() > 26 || (!uniform && kbasis.size() > 22))
        throw std::runtime_error("cycle space too large for expansion; use enumeration");

    // Walk the cycle space; every element of the coset alpha_A + K+ is a
    // distinct-plaquette representation of A, so the largest weight product
    // seen gives the strongest reported lower bound.
    std::vector<f2::Bitset> masked;
    masked.reserve(kbasis.size());
    for (const auto& g : kbasis) {
        f2::Bitset mg(nb);
        g.for_each_set([&](int i) {
            if (alpha_a.test(i)) mg.set(i);
        });
        masked.push_back(std::move(mg));
    }
    const int na = alpha_a.count();
    long double num = 0, den = 0;
    long double best_bound = -1;
    int best_n = na;
    f2::Bitset cur(nb), cur_masked(nb);
    if (uniform) {
        std::vector<long double> tp(size_t(nb) + 1);
        tp[0] = 1;
        for (size_t i = 1; i < tp.size(); ++i) tp[i] = tp[i - 1] * (long double)t;
        int pc = 0, pcm = 0;
        auto add = [&]() {
            den += tp[size_t(pc)];
            int d = pc + na - 2 * pcm;
            num += tp[size_t(d)];
            if (tp[size_t(d)] > best_bound || (tp[size_t(d)] == best_bound && d < best_n)) {
                best_bound = tp[size_t(d)];
                best_n = d;
            }
        };
        add();
        const uint64_t total = uint64_t(1) << kbasis.size();
        for (uint64_t i = 1; i < total; ++i) {
            int bit = std::countr_zero(i);
            pc += cur.xor_count_delta(kbasis[size_t(bit)]);
            pcm += cur_masked.xor_count_delta(masked[size_t(bit)]);
            add();
        }
    } else {
        auto weight = [&](const f2::Bitset& a) {
            long double w = 1;
            a.for_each_set([&](int i) { w *= tB[size_t(i)]; });
            return w;
        };
        auto add = [&]() {
            den += weight(cur);
            f2::Bitset d = cur ^ alpha_a;
            long double w = weight(d);
            num += w;
            int dc = d.count();
            if (w > best_bound || (w == best_bound && dc < best_n)) {
                best_bound = w;
                best_n = dc;
            }
        };
        add();
        const uint64_t total = uint64_t(1) << kbasis.size();
        for (uint64_t i = 1; i < total; ++i) {
            int bit = std::countr_zero(i);
            cur ^= kbasis[size_t(bit)];
            add();
        }
    }
    r.n_alpha = best_n;
    r.plus_lower_bound = double(best_bound);
    if (method == FiniteMethod::enumeration) {
        GibbsSpec spec{model, box, beta, BoundaryCondition::all_plus(), PlaqMode::meeting, std::nullopt};
        std::vector<int> idx;
        for (Site s : A) idx.push_back(box.index_of(s));
        r.value = expectation(spec, [idx](const Spins& sp) {
            double p = 1;
            for (int i : idx) p *= sp.by_index(i);
            return p;
        });
        return r;
    }
    r.value = double(num / den);
    return r;
}

}  // namespace plaq
