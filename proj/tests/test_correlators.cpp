#include <cmath>

#include "doctest.h"
#include "plaq/correlators.hpp"
#include "plaq/gibbs.hpp"

using namespace plaq;

TEST_CASE("infinite-volume multispin averages") {
    const double beta = 1.7, t = std::tanh(beta / 2);
    auto r = multispin_infinite(ModelSpec::spm(), plaquette_sites(ModelSpec::spm(), {0, 0}), beta);
    CHECK(r.equivalent);
    CHECK(r.n == 1);
    CHECK(r.value == doctest::Approx(t).epsilon(1e-14));

    auto zero = multispin_infinite(ModelSpec::spm(), {{0, 0}}, beta);
    CHECK_FALSE(zero.equivalent);
    CHECK(zero.value == 0.0);

    auto sq = multispin_infinite(ModelSpec::spm(), {{0, 0}, {2, 0}, {0, 2}, {2, 2}}, 2.0);
    CHECK(sq.n == 4);
    CHECK(sq.value == doctest::Approx(0.33642976438608246).epsilon(1e-14));

    // log-domain survives huge decompositions
    auto big = multispin_infinite(ModelSpec::spm(), {{0, 0}, {100, 0}, {0, 100}, {100, 100}}, 1.0);
    CHECK(big.n == 10000);
    CHECK(big.value == 0.0);  // underflows cleanly
    CHECK(big.log_value == doctest::Approx(10000 * std::log(std::tanh(0.5))));
}

TEST_CASE("plus-boundary multispin on a finite box") {
    Region box = Region::centered_square(1);
    std::vector<Site> A = plaquette_sites(ModelSpec::spm(), {0, 0});

    // beta = 0 equals the indicator of an empty representation
    auto c0 = multispin_plus_finite(ModelSpec::spm(), box, A, 0.0, FiniteMethod::cycle_expansion);
    CHECK(c0.value == doctest::Approx(0.0));
    auto e0 = multispin_plus_finite(ModelSpec::spm(), box, {}, 0.0, FiniteMethod::cycle_expansion);
    CHECK(e0.value == doctest::Approx(1.0));

    // expansion route equals the spin enumeration
    for (double beta : {0.6, 1.0, 2.3}) {
        auto ce = multispin_plus_finite(ModelSpec::spm(), box, A, beta, FiniteMethod::cycle_expansion);
        auto en = multispin_plus_finite(ModelSpec::spm(), box, A, beta, FiniteMethod::enumeration);
        CHECK(ce.value == doctest::Approx(en.value).epsilon(1e-12));
        CHECK(ce.value >= ce.plus_lower_bound - 1e-13);
        CHECK(ce.n_alpha == 1);
    }

    // the two-site set of the linear construction: value >= tanh^2
    auto pairv = multispin_plus_finite(ModelSpec::spm(), box, {{0, 0}, {0, 1}}, 1.0,
                                       FiniteMethod::cycle_expansion);
    CHECK(pairv.value >= std::pow(std::tanh(0.5), double(pairv.n_alpha)) - 1e-13);

    CHECK_THROWS(multispin_plus_finite(ModelSpec::spm(), box, {{5, 5}}, 1.0));
}

TEST_CASE("finite plus-boundary averages approach the infinite-volume value") {
    std::vector<Site> A = plaquette_sites(ModelSpec::spm(), {0, 0});
    const double beta = 1.0;
    double inf = multispin_infinite(ModelSpec::spm(), A, beta).value;
    double prev = 1e9;
    for (int ell : {1, 2, 3}) {
        auto f = multispin_plus_finite(ModelSpec::spm(), Region::centered_square(ell), A, beta,
                                       FiniteMethod::cycle_expansion);
        double gap = std::abs(f.value - inf);
        CHECK(f.value >= inf - 1e-12);  // plus boundary only helps
        CHECK(gap <= prev + 1e-12);
        prev = gap;
    }
}

TEST_CASE("expectation of a plaquette variable matches the cycle route") {
    // Q_2 with all-plus boundary at beta=2: the center plaquette average from
    // direct enumeration equals the clipped cycle expansion (and the frozen
    // reference value)
    Region q2 = Region::square(2);
    GibbsSpec spec{ModelSpec::spm(), q2, 2.0, BoundaryCondition::all_plus(), PlaqMode::meeting,
                   std::nullopt};
    std::vector<Site> A = plaquette_sites(ModelSpec::spm(), {1, 1});
    std::vector<int> idx;
    for (Site s : A) idx.push_back(q2.index_of(s));
    double direct = expectation(spec, [&](const Spins& s) {
        double p = 1;
        for (int i : idx) p *= s.by_index(i);
        return p;
    });
    auto viacycles = multispin_plus_finite(ModelSpec::spm(), q2, A, 2.0, FiniteMethod::cycle_expansion);
    CHECK(direct == doctest::Approx(viacycles.value).epsilon(1e-12));
    CHECK(direct == doctest::Approx(0.9972754715158086).epsilon(1e-13));
}

TEST_CASE("TPM finite box: expansion equals enumeration") {
    // a small triangular-model box exercises the clipped universe with merged
    // duplicates and the generic cycle-space route
    Region box = Region::box({0, 0}, 3, 3);
    std::vector<Site> A = plaquette_sites(ModelSpec::tpm(), {0, 0});
    for (double beta : {0.8, 1.6}) {
        auto ce = multispin_plus_finite(ModelSpec::tpm(), box, A, beta, FiniteMethod::cycle_expansion);
        auto en = multispin_plus_finite(ModelSpec::tpm(), box, A, beta, FiniteMethod::enumeration);
        CHECK(ce.value == doctest::Approx(en.value).epsilon(1e-12));
        CHECK(ce.value >= ce.plus_lower_bound - 1e-13);
        CHECK(ce.n_alpha == 1);
    }
}
