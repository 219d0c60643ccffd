#include "plaq/geometry.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"

namespace plaq {

std::vector<Site> plaquette_sites(const ModelSpec& spec, Site base) {
    std::vector<Site> out;
    for (Site o : spec.offsets()) out.push_back(base + o);
    return out;
}

Region Region::from_sites(std::vector<Site> sites) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    Region r;
    r.sites_ = std::move(sites);
    r.index_.reserve(r.sites_.size());
    for (int i = 0; i < int(r.sites_.size()); ++i) r.index_.emplace(r.sites_[size_t(i)], i);
    r.kind_label = "explicit";
    return r;
}

Region Region::box(Site corner, int32_t w, int32_t h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("box needs positive dimensions");
    std::vector<Site> s;
    s.reserve(size_t(w) * h);
    for (int32_t j = 0; j < h; ++j)
        for (int32_t i = 0; i < w; ++i) s.push_back({corner.x + i, corner.y + j});
    Region r = from_sites(std::move(s));
    r.kind_label = "box";
    return r;
}

Region Region::square(int32_t ell) {
    Region r = box({1, 1}, ell, ell);
    r.kind_label = "square";
    return r;
}

Region Region::triangle(int32_t n) {
    std::vector<Site> s;
    for (int32_t x = 0; x <= n; ++x)
        for (int32_t y = 0; y <= x; ++y) s.push_back({x, y});
    Region r = from_sites(std::move(s));
    r.kind_label = "triangle";
    return r;
}

Region Region::extended_triangle(int32_t n) {
    std::vector<Site> s;
    for (int32_t x = 0; x <= n; ++x)
        for (int32_t y = 0; y <= x; ++y) s.push_back({x, y});
    for (int32_t i = -1; i <= n; ++i) s.push_back({i, -1});
    Region r = from_sites(std::move(s));
    r.kind_label = "extended-triangle";
    return r;
}

Region Region::decimation_triangle(int32_t n, int32_t N) {
    if (n < 0 || N < 0 || n + N > 20) throw std::invalid_argument("decimation triangle exponent out of range");
    int32_t m = 1 << (n + N);
    std::vector<Site> s;
    for (int32_t y = 0; y <= m; ++y)
        for (int32_t x = 0; x <= y; ++x) s.push_back({x, y});
    Region r = from_sites(std::move(s));
    r.kind_label = "decimation-triangle";
    return r;
}

Region Region::spm_block(int32_t ell, int32_t N) {
    if (ell <= 0 || N <= 0) throw std::invalid_argument("spm block needs positive parameters");
    Region r = box({0, 0}, ell * N + 1, ell * N + 1);
    r.kind_label = "spm-block";
    return r;
}

Region Region::centered_square(int32_t ell) {
    Region r = box({-ell, -ell}, 2 * ell + 1, 2 * ell + 1);
    r.kind_label = "centered-square";
    return r;
}

Region Region::annulus(int32_t inner, int32_t outer) {
    if (inner < 0 || outer <= inner) throw std::invalid_argument("annulus needs 0 <= inner < outer");
    Region r = difference(centered_square(outer), centered_square(inner));
    r.kind_label = "annulus";
    return r;
}

Region Region::difference(const Region& a, const Region& b) {
    std::vector<Site> s;
    for (Site p : a.sites())
        if (!b.contains(p)) s.push_back(p);
    return from_sites(std::move(s));
}

Region Region::translated(Site v) const {
    std::vector<Site> s;
    s.reserve(sites_.size());
    for (Site p : sites_) s.push_back(p + v);
    Region r = from_sites(std::move(s));
    r.kind_label = kind_label;
    return r;
}

std::string Region::to_json() const {
    nlohmann::json j;
    j["kind"] = "explicit";
    nlohmann::json arr = nlohmann::json::array();
    for (Site s : sites_) arr.push_back({s.x, s.y});
    j["sites"] = arr;
    return j.dump();
}

Region Region::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "box") {
        return box({j.at("x").get<int32_t>(), j.at("y").get<int32_t>()},
                   j.at("w").get<int32_t>(), j.at("h").get<int32_t>());
    }
    if (kind == "square") return square(j.at("ell").get<int32_t>());
    if (kind == "centered-square") return centered_square(j.at("ell").get<int32_t>());
    if (kind == "triangle") return triangle(j.at("n").get<int32_t>());
    if (kind == "extended-triangle") return extended_triangle(j.at("n").get<int32_t>());
    if (kind == "decimation-triangle")
        return decimation_triangle(j.at("n").get<int32_t>(), j.at("N").get<int32_t>());
    if (kind == "spm-block") return spm_block(j.at("ell").get<int32_t>(), j.at("N").get<int32_t>());
    if (kind == "explicit") {
        std::vector<Site> s;
        for (const auto& e : j.at("sites")) s.push_back({e.at(0).get<int32_t>(), e.at(1).get<int32_t>()});
        return from_sites(std::move(s));
    }
    throw std::invalid_argument("unknown region kind: " + kind);
}

std::string to_string(PlaqMode m) {
    switch (m) {
        case PlaqMode::meeting: return "meeting";
        case PlaqMode::inside: return "inside";
        default: return "clipped";
    }
}

namespace {

// All bases whose plaquette meets the region.
std::vector<Site> meeting_bases(const ModelSpec& spec, const Region& region) {
    std::vector<Site> bases;
    SiteSet seen;
    for (Site s : region.sites()) {
        for (Site o : spec.offsets()) {
            Site b = s - o;
            if (seen.insert(b).second) bases.push_back(b);
        }
    }
    std::sort(bases.begin(), bases.end());
    return bases;
}

}  // namespace

PlaquetteUniverse PlaquetteUniverse::build(const ModelSpec& model, const Region& region, PlaqMode mode) {
    if (region.empty()) throw std::runtime_error("empty-region");
    PlaquetteUniverse u;
    u.model = model;
    u.region = region;
    u.mode = mode;

    // Keyed by covered region-site index set so that clipped duplicates merge.
    std::map<std::vector<int>, FamilyPlaquette> clipped_canon;

    for (Site b : meeting_bases(model, region)) {
        FamilyPlaquette p;
        p.base = b;
        bool all_inside = true;
        for (Site s : plaquette_sites(model, b)) {
            int idx = region.index_of(s);
            if (idx >= 0)
                p.region_site_idx.push_back(idx);
            else {
                all_inside = false;
                p.exterior_sites.push_back(s);
            }
        }
        std::sort(p.region_site_idx.begin(), p.region_site_idx.end());
        if (mode == PlaqMode::inside && !all_inside) continue;
        if (mode == PlaqMode::clipped) {
            p.exterior_sites.clear();
            auto key = p.region_site_idx;
            auto it = clipped_canon.find(key);
            if (it == clipped_canon.end()) {
                clipped_canon.emplace(std::move(key), std::move(p));
            } else {
                it->second.multiplicity += 1;
                if (p.base < it->second.base) it->second.base = p.base;
            }
            continue;
        }
        u.plaquettes.push_back(std::move(p));
    }
    if (mode == PlaqMode::clipped) {
        for (auto& [key, p] : clipped_canon) u.plaquettes.push_back(std::move(p));
        std::sort(u.plaquettes.begin(), u.plaquettes.end(),
                  [](const FamilyPlaquette& a, const FamilyPlaquette& b) { return a.base < b.base; });
    }
    for (int i = 0; i < int(u.plaquettes.size()); ++i) u.base_index.emplace(u.plaquettes[size_t(i)].base, i);
    return u;
}

std::vector<PlaquetteId> plaquette_family(const ModelSpec& spec, const Region& region, PlaqMode mode) {
    PlaquetteUniverse u = PlaquetteUniverse::build(spec, region, mode);
    std::vector<PlaquetteId> ids;
    ids.reserve(u.size());
    for (const auto& p : u.plaquettes)
        ids.push_back({p.base, mode == PlaqMode::clipped ? PlaqMode::clipped : PlaqMode::meeting});
    return ids;
}

std::vector<Site> gamma_set(int32_t n, int32_t j) {
    if (j < -1 || j > n) throw std::invalid_argument("gamma_set: j must lie in [n]_-");
    std::vector<Site> out;
    for (int32_t i = -1; i <= j; ++i) out.push_back({j, i});
    for (int32_t i = 1; i <= n - j; ++i) out.push_back({j + i, i - 1});
    return out;
}

}  // namespace plaq
