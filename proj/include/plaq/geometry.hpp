#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace plaq {

struct Site {
    int32_t x = 0;
    int32_t y = 0;
    friend bool operator==(Site a, Site b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Site a, Site b) { return !(a == b); }
    friend bool operator<(Site a, Site b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
    friend Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
    friend Site operator-(Site a, Site b) { return {a.x - b.x, a.y - b.y}; }
};

inline int64_t l1_distance(Site a, Site b) {
    return std::abs(int64_t(a.x) - b.x) + std::abs(int64_t(a.y) - b.y);
}

// Graph distance on the triangular lattice mapped to Z^2: neighbours are
// +-e1, +-e2 and +-(e1+e2).
inline int64_t tpm_graph_distance(Site a, Site b) {
    int64_t dx = int64_t(b.x) - a.x, dy = int64_t(b.y) - a.y;
    if ((dx >= 0) == (dy >= 0)) return std::max(std::abs(dx), std::abs(dy));
    return std::abs(dx) + std::abs(dy);
}

struct SiteHash {
    size_t operator()(Site s) const {
        uint64_t k = (uint64_t(uint32_t(s.x)) << 32) | uint32_t(s.y);
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        k *= 0xc4ceb9fe1a85ec53ULL;
        k ^= k >> 33;
        return size_t(k);
    }
};

using SiteSet = std::unordered_set<Site, SiteHash>;

enum class Model : uint8_t { SPM, TPM, GenericRect };

// Which fundamental plaquette B* generates the interaction.
struct ModelSpec {
    Model kind = Model::SPM;
    int32_t rect_w = 2;  // GenericRect only, >= 2
    int32_t rect_h = 2;

    static ModelSpec spm() { return {Model::SPM, 2, 2}; }
    static ModelSpec tpm() { return {Model::TPM, 0, 0}; }
    static ModelSpec rect(int32_t a, int32_t b) {
        if (a < 2 || b < 2) throw std::invalid_argument("generic rectangle needs sides >= 2");
        return {Model::GenericRect, a, b};
    }

    int plaquette_size() const {
        switch (kind) {
            case Model::SPM: return 4;
            case Model::TPM: return 3;
            default: return rect_w * rect_h;
        }
    }
    // ||H|| = |B*|/2
    double half_norm() const { return plaquette_size() / 2.0; }

    // Offsets of B* relative to the base site.
    std::vector<Site> offsets() const {
        switch (kind) {
            case Model::SPM: return {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
            case Model::TPM: return {{0, 0}, {0, 1}, {1, 1}};
            default: {
                std::vector<Site> off;
                off.reserve(size_t(rect_w) * rect_h);
                for (int32_t j = 0; j < rect_h; ++j)
                    for (int32_t i = 0; i < rect_w; ++i) off.push_back({i, j});
                return off;
            }
        }
    }
    std::string name() const {
        switch (kind) {
            case Model::SPM: return "spm";
            case Model::TPM: return "tpm";
            default: return "rect" + std::to_string(rect_w) + "x" + std::to_string(rect_h);
        }
    }
};

// B* + base.
std::vector<Site> plaquette_sites(const ModelSpec& spec, Site base);

// Finite subset of Z^2, stored as a sorted site list plus a hash index.
class Region {
  public:
    Region() = default;
    static Region from_sites(std::vector<Site> sites);
    // w x h sites with the given lower-left corner
    static Region box(Site corner, int32_t w, int32_t h);
    // Q_ell = [ell]^2 = {1..ell}^2
    static Region square(int32_t ell);
    // T*^(n): right triangle with vertices the origin, n e1, n(e1+e2)
    static Region triangle(int32_t n);
    // T^(n) = T*^(n) plus the row {(i,-1) : -1 <= i <= n}
    static Region extended_triangle(int32_t n);
    // T_{n,N}: triangle with vertices the origin, 2^{n+N} e2, 2^{n+N}(e1+e2)
    static Region decimation_triangle(int32_t n, int32_t N);
    // Lambda_{ell,N} = {0,...,ell N}^2
    static Region spm_block(int32_t ell, int32_t N);
    // [-ell, ell]^2
    static Region centered_square(int32_t ell);
    // [-outer,outer]^2 minus [-inner,inner]^2
    static Region annulus(int32_t inner, int32_t outer);
    // set difference
    static Region difference(const Region& a, const Region& b);

    bool contains(Site s) const { return index_.count(s) != 0; }
    // Index of s in the sorted site order, -1 if absent.
    int index_of(Site s) const {
        auto it = index_.find(s);
        return it == index_.end() ? -1 : it->second;
    }
    size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }
    const std::vector<Site>& sites() const { return sites_; }
    Site site(int i) const { return sites_[size_t(i)]; }

    Region translated(Site v) const;

    std::string to_json() const;
    static Region from_json(const std::string& text);

    std::string kind_label;  // set by the named constructors, "explicit" otherwise

  private:
    std::vector<Site> sites_;
    std::unordered_map<Site, int, SiteHash> index_;
};

enum class PlaqMode : uint8_t { meeting, inside, clipped };

std::string to_string(PlaqMode m);

struct PlaquetteId {
    Site base;
    PlaqMode mode = PlaqMode::meeting;
    friend bool operator==(PlaquetteId a, PlaquetteId b) {
        return a.base == b.base && a.mode == b.mode;
    }
};

// One member of a plaquette family relative to a region: the base, the sites
// of the region it covers (indices into the region's sorted order) and, for
// meeting mode, the sites it covers outside the region.
struct FamilyPlaquette {
    Site base;  // canonical base (smallest among merged clipped duplicates)
    std::vector<int> region_site_idx;
    std::vector<Site> exterior_sites;  // empty for inside/clipped
    int multiplicity = 1;  // clipped mode: how many plaquettes share this site set
};

// The indexed universe of plaquettes relative to a region; ParitySets are
// bitsets over this ordering.
struct PlaquetteUniverse {
    ModelSpec model;
    Region region;
    PlaqMode mode = PlaqMode::meeting;
    std::vector<FamilyPlaquette> plaquettes;
    std::unordered_map<Site, int, SiteHash> base_index;

    static PlaquetteUniverse build(const ModelSpec& model, const Region& region, PlaqMode mode);

    size_t size() const { return plaquettes.size(); }
    int index_of_base(Site base) const {
        auto it = base_index.find(base);
        return it == base_index.end() ? -1 : it->second;
    }
};

// B(Lambda), B^f(Lambda) or B^+(Lambda) as a set of ids. Clipped plaquettes
// with identical site sets are merged (canonical id = smallest base).
std::vector<PlaquetteId> plaquette_family(const ModelSpec& spec, const Region& region, PlaqMode mode);

// Gamma(j) = {(j,i): -1<=i<=j} u {(j+i,i-1): 1<=i<=n-j}, j in [n]_-
std::vector<Site> gamma_set(int32_t n, int32_t j);

// Optional plot-output mapping of TPM Z^2 coordinates to the triangular
// lattice embedding in R^2 (basis a1 = e1, a2 = (cos 120, sin 120)).
inline std::pair<double, double> tpm_embed(Site s) {
    return {double(s.x) - 0.5 * double(s.y), 0.8660254037844386 * double(s.y)};
}

}  // namespace plaq
