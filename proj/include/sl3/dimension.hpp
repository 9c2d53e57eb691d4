#pragma once

#include "sl3/lie.hpp"
#include "sl3/rational_points.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sl3 {

// Exponent of the family's covering series as an affine function of s.
struct FamilyExponents {
    int family = 3;
    double slope = -1;
    double intercept = 0;
    double critical_s = 0;
    double at(double s) const { return slope * s + intercept; }
};

FamilyExponents family_exponents(int family, double gamma, const FlowParams& flow);
double critical_dimension(int family, double gamma, const FlowParams& flow);

// empty: the exceptional set is empty (gamma at or above the threshold).
struct DimensionValue {
    bool empty = false;
    double value = 0;
};

DimensionValue dim_upper_bound(double gamma, const FlowParams& flow);
DimensionValue dim_full_space(double gamma, const FlowParams& flow);

struct ShrinkBox {
    RationalPointCanon point;
    Box3 box;
};

struct ShrinkResult {
    std::vector<ShrinkBox> boxes;
    double epsilon0 = 0;
    int halvings = 0;
};

class DegenerateBand : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// Half-widths epsilon0 * d^{-root / (A - gamma_eff)} for the three positive roots.
Box3 shrink_box(double d_q, double gamma_eff, const FlowParams& flow, double epsilon0);

ShrinkResult disjoint_shrink_boxes(const std::vector<RationalPointCanon>& points, double gamma_eff,
                                   const FlowParams& flow, double epsilon0 = 0.25);

// Sets of the form {exp(Y) g : |Y1| <= h1, |Y2| <= h2, |Y3 - (Y1 s2 - Y2 s1)/2| <= h3},
// which is exp(c + B(h)) q written around g = exp(c) q with s = -c.
struct Cube {
    UnipotentUpper base;
    std::array<double, 3> half{};
    std::array<double, 2> shear{};

    double volume() const { return 8 * half[0] * half[1] * half[2]; }
    double diameter() const;
    bool contains_log(const std::array<double, 3>& y) const;
};

struct TreeChild {
    BandPoint point;
    std::array<double, 3> center{};  // Heisenberg coordinates of the representative near the parent
    Box3 box;
    double side = 0;
    int parent = 0;
};

struct TreeLevel {
    int j = 1;
    double l_j = 0;
    std::vector<Cube> parents;
    std::vector<TreeChild> children;
    int64_t parent_count = 0;
    int64_t child_count = 0;
    int64_t cube_count = 0;  // sets of this level after subdivision
    double delta_j = 0;
    double d_j = 0;
    double epsilon0_final = 0;
    bool paper_faithful = true;
    std::string warning;
};

struct CantorOptions {
    double epsilon0 = 0.25;
    bool desk_mode = true;
    bool keep_children = true;
    int64_t budget = INT64_MAX;  // band points visited per level
};

std::vector<TreeLevel> cantor_build(const Box3& U0, double gamma, double epsilon, double K_halfwidth,
                                    const std::vector<double>& schedule, const FlowParams& flow,
                                    const CantorOptions& options = {});

double treelike_lower_bound(const std::vector<double>& deltas, double d_last, int ambient_dim = 3);
double treelike_lower_bound(const std::vector<TreeLevel>& levels, int ambient_dim = 3);

double box_counting_dim(const std::vector<std::array<double, 3>>& points, const std::vector<double>& scales);

}  // namespace sl3
