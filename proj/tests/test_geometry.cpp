#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "plaq/geometry.hpp"

using namespace plaq;

TEST_CASE("fundamental plaquettes") {
    CHECK(plaquette_sites(ModelSpec::spm(), {0, 0}) ==
          std::vector<Site>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    CHECK(plaquette_sites(ModelSpec::tpm(), {2, 3}) == std::vector<Site>{{2, 3}, {2, 4}, {3, 4}});
    auto r = plaquette_sites(ModelSpec::rect(3, 2), {0, 0});
    CHECK(r.size() == 6);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 2; ++y) CHECK(std::count(r.begin(), r.end(), Site{x, y}) == 1);

    CHECK(ModelSpec::spm().half_norm() == doctest::Approx(2.0));
    CHECK(ModelSpec::tpm().half_norm() == doctest::Approx(1.5));
    CHECK_THROWS(ModelSpec::rect(1, 3));
}

TEST_CASE("distances") {
    CHECK(l1_distance({0, 0}, {3, -4}) == 7);
    // triangular-lattice graph distance: diagonal steps are single moves
    CHECK(tpm_graph_distance({0, 0}, {4, 4}) == 4);
    CHECK(tpm_graph_distance({0, 0}, {4, 0}) == 4);
    CHECK(tpm_graph_distance({0, 0}, {-2, 3}) == 5);
}

TEST_CASE("region constructors and cardinalities") {
    for (int n : {0, 1, 5, 12}) CHECK(int(Region::triangle(n).size()) == (n + 1) * (n + 2) / 2);
    CHECK(Region::extended_triangle(4).size() == Region::triangle(4).size() + 6);
    for (int n : {0, 1})
        for (int N : {1, 2}) {
            int m = 1 << (n + N);
            CHECK(int(Region::decimation_triangle(n, N).size()) == (m + 1) * (m + 2) / 2);
        }
    Region q1 = Region::square(1);
    CHECK(q1.size() == 1);
    CHECK(q1.contains({1, 1}));

    Region box = Region::box({-2, 3}, 4, 2);
    CHECK(box.size() == 8);
    CHECK(box.contains({-2, 3}));
    CHECK(box.contains({1, 4}));
    CHECK_FALSE(box.contains({2, 4}));
    // membership is independent of construction order
    auto sites = box.sites();
    std::reverse(sites.begin(), sites.end());
    Region again = Region::from_sites(sites);
    for (Site s : box.sites()) CHECK(again.contains(s));
    CHECK(again.size() == box.size());
}

TEST_CASE("region json round trip") {
    Region tri = Region::decimation_triangle(1, 1);
    Region back = Region::from_json(tri.to_json());
    CHECK(back.sites() == tri.sites());
    Region b2 = Region::from_json(R"({"kind":"square","ell":3})");
    CHECK(b2.size() == 9);
    CHECK_THROWS(Region::from_json(R"({"kind":"pentagon"})"));
}

TEST_CASE("plaquette families") {
    // the 4 plaquettes containing the single site of Q_1
    auto f = plaquette_family(ModelSpec::spm(), Region::square(1), PlaqMode::meeting);
    REQUIRE(f.size() == 4);
    std::vector<Site> bases;
    for (auto id : f) bases.push_back(id.base);
    std::sort(bases.begin(), bases.end());
    std::vector<Site> want = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    std::sort(want.begin(), want.end());
    CHECK(bases == want);

    // only one unit square fits inside Q_2
    auto fin = plaquette_family(ModelSpec::spm(), Region::square(2), PlaqMode::inside);
    REQUIRE(fin.size() == 1);
    CHECK(fin[0].base == Site{1, 1});

    // B(T*^(n)) = plaquettes based in the extended triangle
    int n = 8;
    auto ft = plaquette_family(ModelSpec::tpm(), Region::triangle(n), PlaqMode::meeting);
    Region ext = Region::extended_triangle(n);
    CHECK(ft.size() == ext.size());
    for (auto id : ft) CHECK(ext.contains(id.base));

    CHECK_THROWS_WITH(plaquette_family(ModelSpec::spm(), Region{}, PlaqMode::meeting), "empty-region");
}

TEST_CASE("inside family is a subset of meeting; translation covariance") {
    for (auto model : {ModelSpec::spm(), ModelSpec::tpm()}) {
        Region r = Region::box({0, 0}, 4, 3);
        auto meet = plaquette_family(model, r, PlaqMode::meeting);
        auto inside = plaquette_family(model, r, PlaqMode::inside);
        auto has = [&](Site b) {
            for (auto id : meet)
                if (id.base == b) return true;
            return false;
        };
        for (auto id : inside) CHECK(has(id.base));

        Site v{7, -3};
        auto shifted = plaquette_family(model, r.translated(v), PlaqMode::meeting);
        REQUIRE(shifted.size() == meet.size());
        for (size_t i = 0; i < meet.size(); ++i) CHECK(shifted[i].base == meet[i].base + v);
    }
}

TEST_CASE("clipped plaquettes are canonicalized by site set") {
    // on [-1,1]^2 the SPM clipped family has one plaquette per base of the
    // (2l+2)^2 grid and no two share a site set
    PlaquetteUniverse u =
        PlaquetteUniverse::build(ModelSpec::spm(), Region::centered_square(1), PlaqMode::clipped);
    CHECK(u.size() == 16);
    std::map<std::vector<int>, int> seen;
    for (const auto& p : u.plaquettes) seen[p.region_site_idx]++;
    for (const auto& [k, c] : seen) CHECK(c == 1);

    // a sparse region where distinct bases clip to the same singleton
    Region two = Region::from_sites({{0, 0}, {9, 9}});
    PlaquetteUniverse v = PlaquetteUniverse::build(ModelSpec::spm(), two, PlaqMode::clipped);
    CHECK(v.size() == 2);  // {(0,0)} and {(9,9)} after merging
    CHECK(v.plaquettes[0].multiplicity == 4);  // four plaquettes clip to each singleton
    CHECK(v.plaquettes[1].multiplicity == 4);
}

TEST_CASE("gamma sets") {
    auto g = gamma_set(8, -1);
    CHECK(g.size() == 10);  // n + 2
    CHECK(g.front() == Site{-1, -1});
    for (auto s : gamma_set(8, 3)) CHECK(Region::extended_triangle(8).contains(s));
    CHECK(gamma_set(8, 3) == std::vector<Site>{{3, -1},
                                               {3, 0},
                                               {3, 1},
                                               {3, 2},
                                               {3, 3},
                                               {4, 0},
                                               {5, 1},
                                               {6, 2},
                                               {7, 3},
                                               {8, 4}});
    CHECK(gamma_set(0, 0) == std::vector<Site>{{0, -1}, {0, 0}});
    CHECK_THROWS(gamma_set(4, 5));
    CHECK_THROWS(gamma_set(4, -2));
}

TEST_CASE("gamma sets cover the extended triangle with the stated multiplicity") {
    for (int n : {0, 1, 2, 5, 17, 64}) {
        std::map<std::pair<int, int>, int> count;
        for (int j = -1; j <= n; ++j)
            for (Site s : gamma_set(n, j)) count[{s.x, s.y}]++;
        Region ext = Region::extended_triangle(n);
        CHECK(count.size() == ext.size());
        for (Site z : ext.sites()) {
            int expect = z.y == -1 ? 1 : 2;
            CHECK(count[{z.x, z.y}] == expect);
        }
    }
}

TEST_CASE("annulus and difference helpers") {
    Region ann = Region::annulus(1, 2);
    CHECK(ann.size() == 25 - 9);
    CHECK(ann.contains({2, 0}));
    CHECK_FALSE(ann.contains({1, 1}));
    CHECK_FALSE(ann.contains({0, 0}));
    CHECK_THROWS(Region::annulus(2, 2));

    Region d = Region::difference(Region::square(2), Region::from_sites({{1, 1}}));
    CHECK(d.size() == 3);
}

TEST_CASE("triangular lattice embedding") {
    // plot mapping: a1 horizontal, a2 at 120 degrees; unit plaquette corners
    // map to an equilateral downward triangle
    auto [x0, y0] = tpm_embed({0, 0});
    auto [x1, y1] = tpm_embed({0, 1});
    auto [x2, y2] = tpm_embed({1, 1});
    auto dist = [](double ax, double ay, double bx, double by) {
        return std::hypot(ax - bx, ay - by);
    };
    CHECK(dist(x0, y0, x1, y1) == doctest::Approx(1.0));
    CHECK(dist(x1, y1, x2, y2) == doctest::Approx(1.0));
    CHECK(dist(x0, y0, x2, y2) == doctest::Approx(1.0));
}
