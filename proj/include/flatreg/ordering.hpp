#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flatreg/multiscale.hpp"
#include "flatreg/surface.hpp"

namespace flatreg {

// ---------------------------------------------------------------------------
// Subsurfaces and their orderings

enum class ElementKind { Level, Cylinder };

struct SubsurfaceElement {
    ElementKind kind = ElementKind::Level;
    int level = 0;   // for a cylinder, the level its circumference lives on
    int edge = -1;   // horizontal edge of a cylinder
    std::string name;
};

struct SubsurfaceSet {
    std::vector<SubsurfaceElement> elements;

    int find_level(int level) const;  // index of the level element, -1 if absent
};

SubsurfaceSet subsurfaces_of(const EnhancedLevelGraph& G);

// Indices of the elements, greatest first.
using Ordering = std::vector<int>;

// Level elements in level order, and every cylinder above its circumference's level.
bool is_admissible(const SubsurfaceSet& S, const Ordering& o);
std::vector<Ordering> enumerate_orderings(const SubsurfaceSet& S);
std::vector<Ordering> enumerate_orderings_brute_force(const SubsurfaceSet& S);

// |prod t_k^(a_k)| for a level, times |log |t_h|| for a cylinder.
std::vector<double> element_sizes(const SubsurfaceSet& S, const std::map<int, int>& a, const PlumbingParams& P);
bool is_consistent(const Ordering& o, const std::vector<double>& sizes, double rel_tol = 1e-12);
std::vector<Ordering> consistent_orderings(const SubsurfaceSet& S, const std::vector<double>& sizes);

// rank[i] = position of element i counted from the least (larger is greater).
std::vector<int> ranks(const Ordering& o);
bool is_wide(const SubsurfaceSet& S, const Ordering& o, int element);

// ---------------------------------------------------------------------------
// Curves and adapted bases

struct CurveClass {
    std::string name;
    Eigen::VectorXi cls;
    // each representative lists the elements it meets
    std::vector<std::vector<int>> representatives;
    std::map<int, int> crossings;  // cylinder element -> number of crossings of its circumference
};

struct BasisFixture {
    std::string name;
    SubsurfaceSet S;
    int rank = 0;  // dimension of the (relative) homology
    std::vector<CurveClass> curves;
};

// The least element met by some representative's greatest element.
int level_of(const CurveClass& c, const Ordering& o);

struct AlphaBasis {
    std::vector<int> curves;  // indices into the fixture's curve list
};

AlphaBasis build_alpha_basis(const BasisFixture& F, const Ordering& o);

struct BasisCheck {
    bool prefix = true;          // each H_{<=Z} is spanned by a prefix
    bool single_crossing = true; // at most one wide circumference crossing per element
    bool low_representative = true;
    std::vector<std::string> failures;
    bool ok() const { return prefix && single_crossing && low_representative; }
};

BasisCheck check_alpha_basis(const BasisFixture& F, const Ordering& o, const AlphaBasis& B);

// First-index-greedy subset of `classes` that is independent on W.
std::vector<int> extract_beta_basis(const std::vector<Eigen::VectorXi>& classes, const LinearSubspace& W,
                                    double tau = 1e-10);

// Integer rank of a set of classes.
int class_rank(const std::vector<Eigen::VectorXi>& classes);

std::vector<BasisFixture> basis_fixtures();

// ---------------------------------------------------------------------------
// Volume bounds

// Rectangle in the frame of w: |along w| <= (1 + C')|w|, |across| <= 1/|w| + C'|w|.
struct CylinderRectangle {
    cplx w = 1.0;
    double half_along = 0.0, half_across = 0.0;

    bool contains(cplx z, double tol = 1e-12) const;
    std::array<cplx, 4> corners() const;
    double area() const { return 4.0 * half_along * half_across; }
};

CylinderRectangle cylinder_rectangle(cplx w, double c_prime);

// prod_i (pi eps_i^2 / c^2) * (pi K^2)^(l - k) * R^(j - l)
double volume_bound_product(const std::vector<double>& eps, double c, double K, double R, int j, int l);

struct BoundLemmaRow {
    double t = 0.0;
    std::vector<double> upper_ratio;  // |gamma| / size(level(gamma)), per cycle
    std::vector<double> lower_ratio;  // shortest connection at or above level(gamma) / |gamma|, per cycle
};

struct BoundLemmaReport {
    std::vector<std::string> cycle_names;
    std::vector<std::string> cycle_levels;
    std::vector<BoundLemmaRow> rows;
    double upper_spread = 0.0;  // worst max/min over t of upper_ratio
    double lower_spread = 0.0;
};

// Without an ordering, the first one consistent with the sizes at each t is used;
// a supplied ordering that is inconsistent at some t is a ConfigError.
BoundLemmaReport check_bound_lemmas(const FamilySpec& spec, const std::vector<double>& t_grid,
                                    const std::optional<Ordering>& ordering = std::nullopt);

// The fixture belonging to a concrete synthetic family.
BasisFixture family_fixture(const FamilySpec& spec);

} // namespace flatreg
