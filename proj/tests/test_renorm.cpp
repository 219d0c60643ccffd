#include <cmath>
#include <map>

#include "doctest.h"
#include "plaq/cycles.hpp"
#include "plaq/renorm.hpp"
#include "plaq/rng.hpp"

using namespace plaq;

TEST_CASE("defect probability and its inverse") {
    CHECK(q_of_beta(0) == doctest::Approx(0.5));
    CHECK(q_of_beta(2) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-15));
    CHECK(q_of_beta(40) < 1e-15);
    for (double b = 0.25; b <= 40; b += 0.83) CHECK(beta_of_q(q_of_beta(b)) == doctest::Approx(b).epsilon(1e-12));
    CHECK_THROWS(beta_of_q(0.0));
    CHECK_THROWS(beta_of_q(0.7));
}

TEST_CASE("parity-flip probability") {
    CHECK(phi_q_k(0.23, 1) == doctest::Approx(0.23));
    CHECK(phi_q_k(0.5, 7) == doctest::Approx(0.5));
    CHECK(phi_q_k(0.1, 4) == doctest::Approx(0.2952).epsilon(1e-12));
    // brute-force parity of 4 independent signs with P(-1) = 0.1
    double q = 0.1, brute = 0;
    for (int m = 0; m < 16; ++m) {
        double p = 1;
        int minus = 0;
        for (int i = 0; i < 4; ++i)
            if ((m >> i) & 1) {
                p *= q;
                ++minus;
            } else {
                p *= 1 - q;
            }
        if (minus % 2) brute += p;
    }
    CHECK(phi_q_k(q, 4) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("renormalized coupling") {
    RenormSpec unit = RenormSpec::spm(1);
    for (double b : {0.3, 1.0, 4.0}) CHECK(beta_prime(b, unit).value == doctest::Approx(b).epsilon(1e-12));

    RenormSpec two = RenormSpec::spm(2);
    double t4 = std::pow(std::tanh(1.5), 4.0);
    CHECK(beta_prime(3.0, two).value == doctest::Approx(std::log((1 + t4) / (1 - t4))).epsilon(1e-13));

    // matches the map through q and phi
    for (double b : {0.7, 2.0}) {
        double expect = beta_of_q(phi_q_k(q_of_beta(b), 4));
        CHECK(beta_prime(b, two).value == doctest::Approx(expect).epsilon(1e-12));
    }

    // grows without bound in beta at fixed step
    CHECK(beta_prime(30.0, two).value > beta_prime(20.0, two).value);

    // semigroup property of the square map
    for (double b : {1.0, 2.5}) {
        double ab = beta_prime(b, RenormSpec::spm(6)).value;
        double steps = beta_prime(beta_prime(b, RenormSpec::spm(2)).value, RenormSpec::spm(3)).value;
        CHECK(ab == doctest::Approx(steps).epsilon(1e-10));
    }

    // TPM steps must be powers of two
    CHECK_THROWS(RenormSpec::tpm_ell(3));
    CHECK(RenormSpec::tpm_ell(8).n == 3);
    CHECK(double(RenormSpec::tpm_n(3).k()) == doctest::Approx(27.0));

    // deep underflow is flagged, not thrown
    BetaPrime deep = beta_prime(0.8, RenormSpec::spm(100));
    CHECK(deep.linearized);
    CHECK(deep.exact_zero);
}

TEST_CASE("renormalized plaquette variables and the block identity") {
    auto allplus = [](Site) { return int8_t(1); };
    CHECK(renormalized_plaquette(ModelSpec::spm(), allplus, {0, 0}, 3) == 1);
    auto onedown = [](Site s) { return s == Site{3, 0} ? int8_t(-1) : int8_t(1); };
    CHECK(renormalized_plaquette(ModelSpec::spm(), onedown, {0, 0}, 3) == -1);

    // SPM block identity: hat p_x(sigma|_{L*}) = prod of the l x l block
    rng::Stream st(41, 0);
    for (int ell : {2, 3}) {
        Region block = Region::spm_block(ell, 2);
        std::vector<int8_t> sp(block.size());
        for (int rep = 0; rep < 20; ++rep) {
            for (auto& s : sp) s = st.next_sign();
            auto spin = [&](Site s) { return sp[size_t(block.index_of(s))]; };
            for (int32_t x = 0; x < 2; ++x)
                for (int32_t y = 0; y < 2; ++y) {
                    Site base{ell * x, ell * y};
                    if (ell * x + ell > ell * 2 || ell * y + ell > ell * 2) continue;
                    int8_t lhs = renormalized_plaquette(ModelSpec::spm(), spin, base, ell);
                    int8_t rhs = 1;
                    for (int32_t dx = 0; dx < ell; ++dx)
                        for (int32_t dy = 0; dy < ell; ++dy)
                            rhs = int8_t(rhs * renormalized_plaquette(ModelSpec::spm(), spin,
                                                                      {base.x + dx, base.y + dy}, 1));
                    CHECK(lhs == rhs);
                }
        }
    }

    // TPM analogue: hat p_x = product over the Pascal triangle of unit plaquettes
    for (int n : {1, 2}) {
        int scale = 1 << n;
        Region tri = Region::decimation_triangle(n, 1);
        std::vector<int8_t> sp(tri.size());
        for (int rep = 0; rep < 20; ++rep) {
            for (auto& s : sp) s = st.next_sign();
            auto spin = [&](Site s) { return sp[size_t(tri.index_of(s))]; };
            Site base{0, 0};
            int8_t lhs = renormalized_plaquette(ModelSpec::tpm(), spin, base, scale);
            int8_t rhs = 1;
            for (int32_t r = 0; r < scale; ++r)
                for (int32_t j = 0; j <= r; ++j)
                    if (pascal_parity(r, j))
                        rhs = int8_t(rhs * renormalized_plaquette(ModelSpec::tpm(), spin,
                                                                  {base.x + j, base.y + r}, 1));
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("reconstruction is a bijection") {
    Region block = Region::spm_block(2, 2);
    rng::Stream st(8, 6);
    for (int rep = 0; rep < 5000; ++rep) {
        std::vector<int8_t> sp(block.size());
        for (auto& s : sp) s = st.next_sign();
        auto spin = [&](Site s) { return sp[size_t(block.index_of(s))]; };
        auto pv = [&](Site b) {
            int8_t p = 1;
            for (Site o : ModelSpec::spm().offsets()) p = int8_t(p * spin(b + o));
            return p;
        };
        auto rebuilt = spm_reconstruct(5, spin, pv);
        for (int i = 0; i < int(block.size()); ++i) {
            Site s = block.site(i);
            CHECK(rebuilt[size_t(s.y) * 5 + s.x] == sp[size_t(i)]);
        }
    }
    Region tri = Region::decimation_triangle(1, 1);
    for (int rep = 0; rep < 5000; ++rep) {
        std::vector<int8_t> sp(tri.size());
        for (auto& s : sp) s = st.next_sign();
        auto spin = [&](Site s) { return sp[size_t(tri.index_of(s))]; };
        auto pv = [&](Site b) {
            int8_t p = 1;
            for (Site o : ModelSpec::tpm().offsets()) p = int8_t(p * spin(b + o));
            return p;
        };
        auto rebuilt = tpm_reconstruct(4, tri, spin, pv);
        CHECK(rebuilt == sp);
    }
}

TEST_CASE("free-boundary product sampler") {
    // exact finite check: empirical configuration frequencies on the 2x2 block
    FreeGibbsSampler s(ModelSpec::spm(), 1, 1, 1.0, 77);
    REQUIRE(s.region().size() == 4);
    std::map<uint32_t, int> counts;
    const int nsamp = 40000;
    for (int i = 0; i < nsamp; ++i) {
        SpinConfig c = s.sample(uint64_t(i));
        uint32_t pat = 0;
        for (size_t k = 0; k < 4; ++k)
            if (c.interior[k] < 0) pat |= 1u << k;
        counts[pat]++;
    }
    // exact probabilities: single inside plaquette, weight e^{(beta/2) prod}
    double chi2 = 0;
    double z = 8 * (std::exp(0.5) + std::exp(-0.5));
    for (uint32_t pat = 0; pat < 16; ++pat) {
        int prod = 1;
        for (int k = 0; k < 4; ++k) prod *= (pat >> k) & 1 ? -1 : 1;
        double p = std::exp(0.5 * prod) / z;
        double e = p * nsamp;
        chi2 += (counts[pat] - e) * (counts[pat] - e) / e;
    }
    CHECK(chi2 < 37.7);  // 99.9th percentile of chi^2 with 15 dof

    // defect frequency matches q(beta) within 3 standard errors
    FreeGibbsSampler big(ModelSpec::spm(), 2, 3, 1.0, 5);
    double defects = 0;
    int ndef = 0, nsamp2 = 4000;
    for (int i = 0; i < nsamp2; ++i) {
        SpinConfig c = big.sample(uint64_t(i));
        for (Site b : big.plaquette_bases()) {
            int8_t p = 1;
            for (Site o : ModelSpec::spm().offsets())
                p = int8_t(p * c.interior[size_t(big.region().index_of(b + o))]);
            defects += p < 0;
            ++ndef;
        }
    }
    double freq = defects / ndef;
    double q = q_of_beta(1.0);
    double se = std::sqrt(q * (1 - q) / double(nsamp2 * 36));
    CHECK(std::abs(freq - q) <= 3 * se * 3);  // conservative: plaquettes within a sample correlate

    // beta = 0: single-site magnetization vanishes
    FreeGibbsSampler flat(ModelSpec::tpm(), 1, 1, 0.0, 11);
    double mean = 0;
    int nsamp3 = 20000;
    for (int i = 0; i < nsamp3; ++i) mean += flat.sample(uint64_t(i)).interior[3];
    mean /= nsamp3;
    CHECK(std::abs(mean) <= 3.0 / std::sqrt(double(nsamp3)));
}

TEST_CASE("decimation identity at beta = 0 and a non-cap case") {
    CHECK(decimation_check(ModelSpec::spm(), 2, 1, 0.0).max_discrepancy <= 1e-15);
    CHECK(decimation_check(ModelSpec::spm(), 3, 1, 1.0).max_discrepancy <= 1e-10);
}

TEST_CASE("flip sets") {
    CHECK(tpm_flip_set(0) == std::vector<Site>{{0, 0}, {1, 0}, {1, 1}});
    CHECK(tpm_flip_set(2).size() == 27);
    CHECK(tpm_flip_ell(2) == 7);
    // flipping T_i changes exactly the three stated plaquette variables
    for (int i = 1; i <= 6; ++i) {
        int32_t ell = tpm_flip_ell(i);
        auto changed = flipped_plaquette_bases(ModelSpec::tpm(), tpm_flip_set(i));
        std::vector<Site> want = {{-1, -1}, {ell, -1}, {ell, ell}};
        std::sort(want.begin(), want.end());
        CHECK(changed == want);
    }
    // anchored translation
    auto moved = flipped_plaquette_bases(ModelSpec::tpm(), tpm_flip_set(1, {5, 7}));
    std::vector<Site> want = {{4, 6}, {8, 6}, {8, 10}};
    std::sort(want.begin(), want.end());
    CHECK(moved == want);
}

TEST_CASE("decimated configurations with equal block variables are equally likely") {
    // the flip maps preserve every inside plaquette product, so the
    // free-boundary marginal is constant on classes of decimated
    // configurations sharing their renormalized plaquette variables
    const double beta = 1.3;
    {
        Region fine = Region::spm_block(2, 1);  // {0,1,2}^2, decimate by 2
        GibbsSpec spec{ModelSpec::spm(), fine, beta, BoundaryCondition::free_bc(), PlaqMode::inside,
                       std::nullopt};
        PlaquetteUniverse u = PlaquetteUniverse::build(ModelSpec::spm(), fine, PlaqMode::inside);
        std::vector<int> vsites;
        for (int i = 0; i < int(fine.size()); ++i) {
            Site s = fine.site(i);
            if (s.x % 2 == 0 && s.y % 2 == 0) vsites.push_back(i);
        }
        REQUIRE(vsites.size() == 4);
        std::map<uint32_t, double> prob;  // eta pattern -> probability
        double z = 0;
        for (uint32_t mask = 0; mask < (1u << 9); ++mask) {
            double energy = 0;
            for (const auto& p : u.plaquettes) {
                double pr = 1;
                for (int sidx : p.region_site_idx) pr *= ((mask >> sidx) & 1) ? -1 : 1;
                energy += pr;
            }
            double w = std::exp(beta / 2 * energy);
            uint32_t pat = 0;
            for (size_t i = 0; i < 4; ++i)
                if ((mask >> vsites[i]) & 1) pat |= 1u << i;
            prob[pat] += w;
            z += w;
        }
        // group eta by its single renormalized plaquette variable
        std::map<int, std::vector<double>> classes;
        for (auto& [pat, w] : prob) {
            int pv = 1;
            for (int b = 0; b < 4; ++b) pv *= (pat >> b) & 1 ? -1 : 1;
            classes[pv].push_back(w / z);
        }
        for (auto& [pv, ws] : classes) {
            REQUIRE(ws.size() == 8);  // 2^{2N+1} compatible configurations
            for (double w : ws) CHECK(w == doctest::Approx(ws[0]).epsilon(1e-12));
        }
    }
    {
        Region fine = Region::decimation_triangle(1, 1);  // corner 4, decimate by 2
        PlaquetteUniverse u = PlaquetteUniverse::build(ModelSpec::tpm(), fine, PlaqMode::inside);
        std::vector<int> vsites;
        for (int i = 0; i < int(fine.size()); ++i) {
            Site s = fine.site(i);
            if (s.x % 2 == 0 && s.y % 2 == 0) vsites.push_back(i);
        }
        REQUIRE(vsites.size() == 6);
        std::map<uint32_t, double> prob;
        double z = 0;
        for (uint32_t mask = 0; mask < (1u << 15); ++mask) {
            double energy = 0;
            for (const auto& p : u.plaquettes) {
                double pr = 1;
                for (int sidx : p.region_site_idx) pr *= ((mask >> sidx) & 1) ? -1 : 1;
                energy += pr;
            }
            double w = std::exp(beta / 2 * energy);
            uint32_t pat = 0;
            for (size_t i = 0; i < 6; ++i)
                if ((mask >> vsites[i]) & 1) pat |= 1u << i;
            prob[pat] += w;
            z += w;
        }
        // three renormalized plaquettes: bases (0,0),(0,2),(2,2) scaled by 2
        Region coarse = Region::decimation_triangle(0, 1);
        std::map<std::tuple<int, int, int>, std::vector<double>> classes;
        for (auto& [pat, w] : prob) {
            auto spin = [&](Site s) {
                int idx = coarse.index_of({s.x / 2, s.y / 2});
                return int8_t((pat >> idx) & 1 ? -1 : 1);
            };
            int p1 = renormalized_plaquette(ModelSpec::tpm(), spin, {0, 0}, 2);
            int p2 = renormalized_plaquette(ModelSpec::tpm(), spin, {0, 2}, 2);
            int p3 = renormalized_plaquette(ModelSpec::tpm(), spin, {2, 2}, 2);
            classes[{p1, p2, p3}].push_back(w / z);
        }
        for (auto& [key, ws] : classes) {
            REQUIRE(ws.size() == 8);  // 2^{2^N + 1}
            for (double w : ws) CHECK(w == doctest::Approx(ws[0]).epsilon(1e-12));
        }
    }
}
