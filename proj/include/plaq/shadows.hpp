#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plaq/geometry.hpp"

namespace plaq {

// Screen for shadow constructions: a horizontal line for the TPM, a positive
// or negative corner for the SPM.
struct ShadowScreen {
    enum class Kind : uint8_t { TpmLine, SpmCorner } kind = Kind::TpmLine;
    int32_t line_y = 0;   // TpmLine
    Site apex{};          // SpmCorner
    bool positive = false;

    static ShadowScreen tpm_line(int32_t y) {
        ShadowScreen s;
        s.kind = Kind::TpmLine;
        s.line_y = y;
        return s;
    }
    static ShadowScreen spm_corner(bool positive, Site apex) {
        ShadowScreen s;
        s.kind = Kind::SpmCorner;
        s.apex = apex;
        s.positive = positive;
        return s;
    }
    bool covers(Site x) const {
        if (kind == Kind::TpmLine) return x.y <= line_y;
        return positive ? (x.x >= apex.x && x.y >= apex.y) : (x.x <= apex.x && x.y <= apex.y);
    }
    bool on_screen(Site x) const {
        if (kind == Kind::TpmLine) return x.y == line_y;
        return covers(x) && (x.x == apex.x || x.y == apex.y);
    }
};

// Smallest admissible screen beyond the bounding box of A.
ShadowScreen auto_screen(const ModelSpec& model, const std::vector<Site>& A);

// The shadow of x on the screen: x itself when x lies on the screen; else the
// Lucas-parity row (TPM) or the three remaining rectangle corners (SPM).
std::vector<Site> shadow(const ModelSpec& model, Site x, const ShadowScreen& screen);

// Bases of B_{x,R}: the plaquette family whose F2 vertex sum is {x} + shadow(x).
std::vector<Site> shadow_plaquettes(const ModelSpec& model, Site x, const ShadowScreen& screen);

struct Decomposition {
    std::vector<Site> bases;  // distinct plaquette bases, sorted
    size_t size() const { return bases.size(); }
};

bool is_null_equivalent(const ModelSpec& model, const std::vector<Site>& A);
bool is_null_equivalent_with(const ModelSpec& model, const std::vector<Site>& A, const ShadowScreen& screen);

// The unique minimal plaquette decomposition of A, or nullopt when A is not
// equivalent to the empty set. The result's F2 vertex sum is re-verified.
std::optional<Decomposition> minimal_decomposition(const ModelSpec& model, const std::vector<Site>& A);
std::optional<Decomposition> minimal_decomposition_with(const ModelSpec& model, const std::vector<Site>& A,
                                                        const ShadowScreen& screen);

// F2 vertex sum of a family of plaquettes (for verification and oracles).
std::vector<Site> vertex_sum(const ModelSpec& model, const std::vector<Site>& bases);

}  // namespace plaq
