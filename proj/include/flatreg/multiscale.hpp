#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flatreg/surface.hpp"

namespace flatreg {

// ---------------------------------------------------------------------------
// Enhanced level graphs

struct GraphVertex {
    int genus = 0;
    int level = 0;  // 0 is the top level, lower levels are negative
};

enum class EdgeKind { Horizontal, Vertical };

struct GraphEdge {
    int a = 0, b = 0;  // endpoints; for vertical edges a is the upper vertex
    EdgeKind kind = EdgeKind::Vertical;
    int enhancement = 1;  // cone angle 2*pi*b at the node; unused for horizontal edges
    int prong = 0;
};

struct HalfEdge {
    int vertex = 0;
    int order = 0;
};

struct EnhancedLevelGraph {
    std::vector<GraphVertex> vertices;
    std::vector<GraphEdge> edges;
    std::vector<HalfEdge> half_edges;

    int depth() const;  // N, the number of levels below the top
    std::vector<int> horizontal_edges() const;
};

struct GraphReport {
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

GraphReport validate_graph(const EnhancedLevelGraph& G, const StratumSignature& sig);
StratumSignature signature_of(const EnhancedLevelGraph& G);

EnhancedLevelGraph graph_from_json(const std::string& text);
std::string to_json(const EnhancedLevelGraph& G);

// a[i] for levels i = -1 .. -N, keyed by level.
std::map<int, int> compute_a(const EnhancedLevelGraph& G);

// ---------------------------------------------------------------------------
// Plumbing parameters and sectors

struct PlumbingParams {
    std::map<int, cplx> t;       // level (-1 .. -N) -> scaling parameter
    std::map<int, cplx> t_h;     // horizontal edge index -> parameter
    std::vector<cplx> s;         // moduli
    cplx p = 0.25;               // truncation point for perturbed periods
};

// A log that is continuous on an arc of directions, given by a lower end and
// a width below 2*pi; arguments are lifted into [lo, lo + width].
class LogBranch {
public:
    LogBranch() = default;
    LogBranch(double lo, double width);
    static LogBranch around(double center, double width);
    // arc that contains arg(z) with some slack, used when no sector is at hand
    static LogBranch containing(cplx z);

    double lo() const { return lo_; }
    double width() const { return width_; }
    bool contains_arg(cplx z) const;
    double lift_arg(cplx z) const;  // throws BranchError outside the arc
    cplx log(cplx z) const;

private:
    double lo_ = -1.0;
    double width_ = 2.0;
};

struct MultiSector {
    double eps = 0.1;
    std::map<int, double> vertical_lo;    // level -> lower end of the arc for arg t_level
    std::map<int, double> horizontal_lo;  // horizontal edge -> lower end of the arc for arg t_h
    std::map<int, int> a;                 // copied from the graph

    static constexpr double horizontal_width() { return 0.78539816339744830962; }  // pi/4
    double vertical_width(int level) const;
    bool contains(const PlumbingParams& P) const;
    LogBranch vertical_branch(int level) const;
    LogBranch horizontal_branch(int edge) const;
};

// Sector of the given graph whose arcs start at the given angles.
MultiSector make_sector(const EnhancedLevelGraph& G, double eps, const std::map<int, double>& vertical_lo,
                        const std::map<int, double>& horizontal_lo = {});

// ---------------------------------------------------------------------------
// Plumbing calculus

// T = prod_{k = lower}^{upper - 1} t_k^(a_k / b) for a vertical edge from level
// `upper` down to level `lower`. Throws ConfigError if an exponent is not integral.
cplx plumbing_T(const EnhancedLevelGraph& G, const std::map<int, int>& a, const PlumbingParams& P, int edge);
bool glue_ok(cplx u, cplx v, cplx T, double tol = 1e-12);

// prod_{k=-1}^{level} t_k^(a_k); 1 at the top level.
cplx rescale_factor(int level, const std::map<int, int>& a, const PlumbingParams& P);

// Integral of (u^(b-1) + T^b r / u) du from T to p; log T is taken on `branch`,
// log p is the principal value.
cplx annulus_period(int b, cplx r, cplx T, cplx p, const LogBranch& branch);
// (r/2) log t on `branch`: the part of a crossing curve from |u| = 1 to sqrt(t).
cplx cylinder_cross_period(cplx r, cplx t, const LogBranch& branch);

// Path quadrature of the same integrals: a radial leg from T out to |p| and an arc
// to arg p (annulus), or a radial leg from 1 to |sqrt t| and an arc (cylinder).
cplx annulus_period_quadrature(int b, cplx r, cplx T, cplx p, const LogBranch& branch);
cplx cylinder_cross_period_quadrature(cplx r, cplx t, const LogBranch& branch);

// Relative mismatch of t^a (u^(b-1) + T^b r/u) du against -t^a T^b (v^(-b-1) + r/v) dv
// under u = T/v, both written as multiples of dv.
double matching_defect(int b, cplx r, cplx T, cplx scale, cplx v);

// ---------------------------------------------------------------------------
// Synthetic plumbed families

enum class FamilyKind {
    TwoLevel,    // torus with one handle scaled by t (b = 1, no residue)
    ThreeLevel,  // a second handle nested inside the first, scaled by t1*t2
    Horizontal,  // torus with a handle glued in through a cylinder of cross period ~ r log t
    Residue,     // symbolic two-level family with a residue term; no flat surface
};

struct FamilySpec {
    FamilyKind kind = FamilyKind::TwoLevel;
    cplx omega1 = 1.0, omega2 = cplx(0.3, 1.0);  // top-level torus
    cplx node = cplx(0.55, 0.45);                 // node in lattice coordinates of the torus
    cplx slit = cplx(0.5, 0.1), cross = cplx(0.1, 0.6);    // level -1 handle
    cplx node2 = cplx(1.4, 0.9);                  // second node, in level -1 coordinates
    cplx slit2 = cplx(0.4, -0.2), cross2 = cplx(0.15, 0.5); // level -2 handle
    cplx cross_offset = cplx(0.05, 0.0);          // horizontal family: part of the cross curve outside the cylinder
    int b = 1;                                    // residue family
    cplx residue = 0.0;                           // residue family: r(t) = residue + residue_slope * t
    cplx residue_slope = 0.0;
    cplx pert = cplx(0.4, 0.2);                   // residue family: perturbed period
    cplx lower = cplx(-0.3, 0.5);                 // residue family: lower-level period
    cplx p = 0.25;
};

// One designated relative cycle and the three-part split of its period.
struct CycleTerms {
    std::string name;
    int level = 0;          // level the cycle starts on (its prefactor level)
    bool crosses_cylinder = false;
    cplx prefactor = 1.0;
    cplx pert = 0.0;        // truncated period on its own level, before rescaling
    cplx plumbing = 0.0;    // annulus and cylinder contributions, before rescaling
    cplx lower = 0.0;       // lower-level part, before rescaling
    cplx total() const { return prefactor * (pert + plumbing + lower); }
};

struct FamilyPoint {
    bool concrete = false;
    TranslationSurface surface;         // empty for symbolic families
    StratumSignature signature;
    std::vector<CycleTerms> cycles;     // same order as the surface's class basis
    Eigen::VectorXcd surface_periods;   // from the triangulation's edge classes
    cplx t = 0.0;                       // the expansion variable t_{-1}^{a_{-1}}
};

EnhancedLevelGraph family_graph(const FamilySpec& spec);

// t holds the level parameters (t[-1], t[-2]) and, for the horizontal family, t_h[0].
FamilyPoint assemble_synthetic_family(const FamilySpec& spec, const PlumbingParams& params,
                                      const LogBranch& branch = LogBranch::around(0.0, 3.0));

// ---------------------------------------------------------------------------
// Period expansion

struct PeriodExpansion {
    cplx prefactor = 1.0;
    cplx pert = 0.0;
    cplx c = 0.0, f_coeff = 0.0, g_coeff = 0.0;
    double h_bound = 0.0;  // max |residual / t| over the grid
};

struct ExpansionWindow {
    double t_hi = 0.0, t_lo = 0.0;
    double max_residual = 0.0;
    double residual_over_t = 0.0;  // max over the window of |residual| / |t|
    cplx g = 0.0;
};

struct ExpansionReport {
    PeriodExpansion expansion;       // global fit over the whole grid
    double max_residual = 0.0;
    std::vector<ExpansionWindow> windows;  // one-decade windows toward t = 0
    bool residual_decreasing = false;
};

// Fit period/prefactor - pert against {1, t, t log t} along t_values * direction.
ExpansionReport verify_period_expansion(const FamilySpec& spec, int cycle, const std::vector<double>& t_moduli,
                                        double arg_t = 0.0);

std::vector<double> geometric_grid(double hi, double lo, int points_per_decade);

// ---------------------------------------------------------------------------
// Non-injectivity across sectors

struct NoninjReport {
    cplx t1 = 0.0, t2 = 0.0;
    double period_distance = 0.0;
    double coordinate_distance = 0.0;
    bool same_sector_possible = false;  // could one vertical arc hold both arguments
    long sampled_pairs = 0;
    double min_sampled_distance = 0.0;
    int a = 0;
};

// Period vector of the H(3,1) two-level model with moduli s and scaling t.
Eigen::VectorXcd h31_periods(const std::vector<cplx>& s, cplx t, cplx p = 0.25);

NoninjReport reproduce_noninjectivity(const EnhancedLevelGraph& G, cplx t, long pairs, std::uint64_t seed,
                                      double eps = 0.1);

EnhancedLevelGraph h31_graph(int b = 2);
EnhancedLevelGraph h22_graph();

} // namespace flatreg
