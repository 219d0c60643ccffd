#include "plaq/shadows.hpp"

#include <algorithm>
#include <stdexcept>

#include "plaq/f2.hpp"

namespace plaq {

namespace {

void xor_site(SiteSet& set, Site s) {
    auto it = set.find(s);
    if (it == set.end())
        set.insert(s);
    else
        set.erase(it);
}

// One Pascal row as a bit vector; step() advances row k -> k+1 via
// row ^= row << 1, so bit j of row k is the parity of C(k, j).
struct PascalRow {
    std::vector<uint64_t> w{1};
    int width = 1;

    void step() {
        ++width;
        if ((width + 63) / 64 > int(w.size())) w.push_back(0);
        uint64_t carry = 0;
        for (size_t i = 0; i < w.size(); ++i) {
            uint64_t nc = w[i] >> 63;
            w[i] ^= (w[i] << 1) | carry;
            carry = nc;
        }
    }
    template <typename F>
    void for_each_set(F&& f) const {
        for (size_t i = 0; i < w.size(); ++i) {
            uint64_t v = w[i];
            while (v) {
                f(int(i * 64) + std::countr_zero(v));
                v &= v - 1;
            }
        }
    }
};

void require_covered(const ShadowScreen& screen, Site x) {
    if (!screen.covers(x)) throw std::runtime_error("shadow screen does not cover the vertex");
}

}  // namespace

ShadowScreen auto_screen(const ModelSpec& model, const std::vector<Site>& A) {
    int32_t mx = 0, my = 0;
    bool first = true;
    for (Site s : A) {
        if (first) {
            mx = s.x;
            my = s.y;
            first = false;
        } else {
            mx = std::max(mx, s.x);
            my = std::max(my, s.y);
        }
    }
    if (model.kind == Model::TPM) return ShadowScreen::tpm_line(my + 1);
    return ShadowScreen::spm_corner(false, {mx + 1, my + 1});
}

std::vector<Site> shadow(const ModelSpec& model, Site x, const ShadowScreen& screen) {
    require_covered(screen, x);
    if (screen.on_screen(x)) return {x};
    if (model.kind == Model::TPM) {
        if (screen.kind != ShadowScreen::Kind::TpmLine) throw std::invalid_argument("TPM shadows need a line screen");
        const int32_t k = screen.line_y - x.y;
        PascalRow row;
        for (int32_t i = 0; i < k; ++i) row.step();
        std::vector<Site> out;
        row.for_each_set([&](int j) { out.push_back({x.x + j, screen.line_y}); });
        return out;
    }
    if (screen.kind != ShadowScreen::Kind::SpmCorner) throw std::invalid_argument("SPM shadows need a corner screen");
    Site a = screen.apex;
    return {{x.x, a.y}, {a.x, x.y}, {a.x, a.y}};
}

std::vector<Site> shadow_plaquettes(const ModelSpec& model, Site x, const ShadowScreen& screen) {
    require_covered(screen, x);
    std::vector<Site> bases;
    if (screen.on_screen(x)) return bases;
    if (model.kind == Model::TPM) {
        const int32_t k = screen.line_y - x.y;
        PascalRow row;
        for (int32_t r = 0; r < k; ++r) {
            row.for_each_set([&](int j) { bases.push_back({x.x + j, x.y + r}); });
            row.step();
        }
        return bases;
    }
    Site a = screen.apex;
    int32_t ux0 = std::min(x.x, a.x), ux1 = std::max(x.x, a.x);
    int32_t uy0 = std::min(x.y, a.y), uy1 = std::max(x.y, a.y);
    for (int32_t u = ux0; u < ux1; ++u)
        for (int32_t v = uy0; v < uy1; ++v) bases.push_back({u, v});
    return bases;
}

std::vector<Site> vertex_sum(const ModelSpec& model, const std::vector<Site>& bases) {
    SiteSet acc;
    for (Site b : bases)
        for (Site s : plaquette_sites(model, b)) xor_site(acc, s);
    std::vector<Site> out(acc.begin(), acc.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {
std::vector<Site> as_site_set(const std::vector<Site>& A) {
    std::vector<Site> a(A.begin(), A.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}
}  // namespace

bool is_null_equivalent_with(const ModelSpec& model, const std::vector<Site>& A, const ShadowScreen& screen) {
    SiteSet acc;
    for (Site x : as_site_set(A))
        for (Site s : shadow(model, x, screen)) xor_site(acc, s);
    return acc.empty();
}

bool is_null_equivalent(const ModelSpec& model, const std::vector<Site>& A) {
    if (A.empty()) return true;
    if (model.kind == Model::GenericRect) return minimal_decomposition(model, A).has_value();
    return is_null_equivalent_with(model, A, auto_screen(model, A));
}

namespace {

// Generic-rectangle fallback: unique F2 solve over the inside family of an
// expanded bounding box (corner peeling makes the inside family independent,
// so a solution, when it exists, is the minimal decomposition).
std::optional<Decomposition> generic_decomposition(const ModelSpec& model, const std::vector<Site>& A) {
    if (A.empty()) return Decomposition{};
    int32_t x0 = A[0].x, x1 = A[0].x, y0 = A[0].y, y1 = A[0].y;
    for (Site s : A) {
        x0 = std::min(x0, s.x);
        x1 = std::max(x1, s.x);
        y0 = std::min(y0, s.y);
        y1 = std::max(y1, s.y);
    }
    const int32_t mw = model.rect_w, mh = model.rect_h;
    Region box = Region::box({x0 - mw, y0 - mh}, (x1 - x0) + 2 * mw + 1, (y1 - y0) + 2 * mh + 1);
    PlaquetteUniverse u = PlaquetteUniverse::build(model, box, PlaqMode::inside);
    f2::Eliminator elim(int(box.size()), int(u.size()));
    for (size_t p = 0; p < u.size(); ++p) {
        f2::Bitset v(int(box.size()));
        for (int s : u.plaquettes[p].region_site_idx) v.flip(s);
        elim.add(v, int(p));
    }
    f2::Bitset target(int(box.size()));
    for (Site s : A) target.flip(box.index_of(s));
    auto combo = elim.solve(target);
    if (!combo) return std::nullopt;
    Decomposition d;
    combo->for_each_set([&](int p) { d.bases.push_back(u.plaquettes[size_t(p)].base); });
    std::sort(d.bases.begin(), d.bases.end());
    return d;
}

}  // namespace

std::optional<Decomposition> minimal_decomposition_with(const ModelSpec& model, const std::vector<Site>& A,
                                                        const ShadowScreen& screen) {
    std::vector<Site> want = as_site_set(A);
    if (!is_null_equivalent_with(model, want, screen)) return std::nullopt;
    // odd-multiplicity merge of the per-vertex families
    SiteSet odd;
    for (Site x : want)
        for (Site b : shadow_plaquettes(model, x, screen)) xor_site(odd, b);
    Decomposition d;
    d.bases.assign(odd.begin(), odd.end());
    std::sort(d.bases.begin(), d.bases.end());

    if (vertex_sum(model, d.bases) != want)
        throw std::logic_error("minimal decomposition failed vertex-sum verification");
    return d;
}

std::optional<Decomposition> minimal_decomposition(const ModelSpec& model, const std::vector<Site>& A) {
    if (model.kind == Model::GenericRect) return generic_decomposition(model, A);
    if (A.empty()) return Decomposition{};
    return minimal_decomposition_with(model, A, auto_screen(model, A));
}

}  // namespace plaq
