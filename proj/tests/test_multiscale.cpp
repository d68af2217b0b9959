#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flatreg/errors.hpp"
#include "flatreg/multiscale.hpp"
#include "flatreg/rng.hpp"

using namespace flatreg;

namespace {

constexpr double kPi = std::numbers::pi;

EnhancedLevelGraph bad_orders() {
    EnhancedLevelGraph G = h31_graph(2);
    G.half_edges[1].order = 2;
    return G;
}

} // namespace

// ---------------------------------------------------------------------------
// Level graphs

TEST(Graph, H31IsValid) {
    const EnhancedLevelGraph G = h31_graph(2);
    const StratumSignature sig{{3, 1}};
    EXPECT_TRUE(validate_graph(G, sig).ok());
    EXPECT_EQ(compute_a(G).at(-1), 2);
    EXPECT_EQ(G.depth(), 1);
}

TEST(Graph, H22IsValid) { EXPECT_TRUE(validate_graph(h22_graph(), StratumSignature{{2, 2}}).ok()); }

TEST(Graph, WrongOrdersAreReported) {
    const GraphReport rep = validate_graph(bad_orders(), StratumSignature{{3, 1}});
    EXPECT_FALSE(rep.ok());
}

TEST(Graph, EmptyLevelIsReported) {
    EnhancedLevelGraph G = h22_graph();
    G.vertices[1].level = -2;
    EXPECT_FALSE(validate_graph(G, StratumSignature{{2, 2}}).ok());
}

TEST(Graph, HorizontalAcrossLevelsIsReported) {
    EnhancedLevelGraph G = h22_graph();
    G.edges[0].kind = EdgeKind::Horizontal;
    EXPECT_FALSE(validate_graph(G, StratumSignature{{2, 2}}).ok());
}

TEST(Graph, ALcmOverCrossingEdges) {
    EnhancedLevelGraph G;
    G.vertices = {{0, 0}, {0, 0}, {0, -1}};
    G.edges = {{0, 2, EdgeKind::Vertical, 2, 0}, {1, 2, EdgeKind::Vertical, 3, 1}};
    EXPECT_EQ(compute_a(G).at(-1), 6);
}

TEST(Graph, JsonRoundTrip) {
    const EnhancedLevelGraph G = h31_graph(2);
    const EnhancedLevelGraph H = graph_from_json(to_json(G));
    EXPECT_EQ(to_json(G), to_json(H));
}

TEST(Graph, JsonMissingKeyIsConfigError) {
    EXPECT_THROW(graph_from_json(R"({"vertices": [], "edges": []})"), ConfigError);
    EXPECT_THROW(graph_from_json("not json"), ConfigError);
}

TEST(Graph, FamilyGraphsMatchTheirSurfaces) {
    for (FamilyKind k : {FamilyKind::TwoLevel, FamilyKind::ThreeLevel, FamilyKind::Horizontal, FamilyKind::Residue}) {
        FamilySpec spec;
        spec.kind = k;
        spec.b = 2;
        const EnhancedLevelGraph G = family_graph(spec);
        EXPECT_TRUE(validate_graph(G, signature_of(G)).ok()) << static_cast<int>(k);
    }
}

// ---------------------------------------------------------------------------
// Branches and sectors

TEST(Branch, LiftsIntoArc) {
    const LogBranch br(3.0, 1.0);
    EXPECT_NEAR(br.lift_arg(std::polar(1.0, 3.5)), 3.5, 1e-15);
    EXPECT_NEAR(br.lift_arg(std::polar(1.0, -2.9)), -2.9 + 2 * kPi, 1e-12);
    EXPECT_THROW(br.lift_arg(std::polar(1.0, 0.0)), BranchError);
    EXPECT_THROW(br.log(0.0), BranchError);
    EXPECT_THROW(LogBranch(0.0, 7.0), ConfigError);
}

TEST(Branch, LogIsContinuousAcrossNegativeAxis) {
    const LogBranch br = LogBranch::around(kPi, 1.0);
    const cplx above = br.log(std::polar(0.1, kPi - 1e-9)), below = br.log(std::polar(0.1, kPi + 1e-9));
    EXPECT_NEAR(std::abs(above - below), 2e-9, 1e-12);
}

TEST(Sector, WidthsFollowA) {
    const MultiSector V = make_sector(h31_graph(2), 0.1, {{-1, 0.0}});
    EXPECT_NEAR(V.vertical_width(-1), kPi / 8, 1e-15);
    EXPECT_NEAR(MultiSector::horizontal_width(), kPi / 4, 1e-15);
}

TEST(Sector, Membership) {
    const MultiSector V = make_sector(h31_graph(2), 0.1, {{-1, 0.0}});
    PlumbingParams P;
    P.t[-1] = std::polar(0.05, 0.2);
    EXPECT_TRUE(V.contains(P));
    P.t[-1] = std::polar(0.05, 0.5);
    EXPECT_FALSE(V.contains(P));
    P.t[-1] = std::polar(0.2, 0.2);
    EXPECT_FALSE(V.contains(P));
    P.t[-1] = std::polar(0.05, 0.2);
    P.s = {0.2};
    EXPECT_FALSE(V.contains(P));
}

// ---------------------------------------------------------------------------
// Plumbing calculus

TEST(Plumbing, TAndGluing) {
    const EnhancedLevelGraph G = h31_graph(2);
    PlumbingParams P;
    P.t[-1] = cplx(0.03, 0.01);
    const cplx T = plumbing_T(G, compute_a(G), P, 0);
    EXPECT_NEAR(std::abs(T - P.t[-1]), 0.0, 1e-15);  // a/b = 1
    const cplx v(0.2, 0.1);
    EXPECT_TRUE(glue_ok(T / v, v, T));
    EXPECT_FALSE(glue_ok(T / v * 1.001, v, T));
}

TEST(Plumbing, NonIntegralExponentIsConfigError) {
    EnhancedLevelGraph G;
    G.vertices = {{0, 0}, {0, 0}, {0, -1}};
    G.edges = {{0, 2, EdgeKind::Vertical, 2, 0}, {1, 2, EdgeKind::Vertical, 3, 0}};
    std::map<int, int> a = {{-1, 4}};  // not a multiple of 3
    PlumbingParams P;
    P.t[-1] = 0.1;
    EXPECT_THROW(plumbing_T(G, a, P, 1), ConfigError);
}

TEST(Plumbing, RescaleFactor) {
    PlumbingParams P;
    P.t[-1] = 0.1;
    P.t[-2] = 0.2;
    const std::map<int, int> a = {{-1, 2}, {-2, 3}};
    EXPECT_NEAR(std::abs(rescale_factor(0, a, P) - 1.0), 0.0, 0.0);
    EXPECT_NEAR(std::abs(rescale_factor(-2, a, P) - 0.01 * 0.008), 0.0, 1e-18);
}

TEST(Plumbing, AnnulusClosedFormSpecialCases) {
    const LogBranch br = LogBranch::around(0.0, 3.0);
    // no residue, b = 1: the integral of du
    EXPECT_NEAR(std::abs(annulus_period(1, 0.0, 0.01, 0.25, br) - 0.24), 0.0, 1e-15);
    // pure residue term: T^b r log(p/T)
    const cplx z = annulus_period(2, 1.0, 0.1, 0.5, br) - (0.25 - 0.01) / 2.0;
    EXPECT_NEAR(std::abs(z - 0.01 * std::log(5.0)), 0.0, 1e-15);
}

TEST(Plumbing, AnnulusRejectsTBeyondP) {
    EXPECT_THROW(annulus_period(1, 0.0, 0.5, 0.25, LogBranch()), ConfigError);
}

TEST(Plumbing, CrossPeriodLeadingTerm) {
    const LogBranch br = LogBranch::around(0.0, 3.0);
    const cplx r(0.2, 0.1);
    EXPECT_NEAR(std::abs(cylinder_cross_period(r, 1e-4, br) - 0.5 * r * std::log(1e-4)), 0.0, 1e-15);
}

TEST(Plumbing, QuadratureAgreesOnRandomDraws) {
    for (std::uint64_t i = 0; i < 50; ++i) {
        CounterRng g(21, i);
        const int b = 1 + static_cast<int>(g.uniform() * 4);
        const double m = std::pow(10.0, g.uniform(-6.0, -1.0));
        const double arg = g.uniform(-kPi, kPi);
        const cplx T = std::polar(m, arg);
        const cplx r(g.uniform(-2, 2), g.uniform(-2, 2));
        const LogBranch br = LogBranch::around(arg, 1.0);
        const cplx p = 0.25;
        EXPECT_NEAR(std::abs(annulus_period(b, r, T, p, br) - annulus_period_quadrature(b, r, T, p, br)), 0.0, 1e-9);
        const cplx t = std::polar(m, arg);
        EXPECT_NEAR(std::abs(cylinder_cross_period(r, t, br) - cylinder_cross_period_quadrature(r, t, br)), 0.0, 1e-9);
    }
}

TEST(Plumbing, DifferentialsMatchUnderGluing) {
    for (std::uint64_t i = 0; i < 100; ++i) {
        CounterRng g(5, i);
        const int b = 1 + static_cast<int>(g.uniform() * 4);
        const cplx T = std::polar(std::pow(10.0, g.uniform(-4.0, -1.0)), g.uniform(-kPi, kPi));
        const cplx r(g.uniform(-2, 2), g.uniform(-2, 2));
        // a point of the annulus |T| < |v| < 1
        const cplx v = std::polar(std::pow(std::abs(T), g.uniform(0.05, 0.95)), g.uniform(-kPi, kPi));
        EXPECT_LT(matching_defect(b, r, T, std::pow(T, b), v), 1e-12);
    }
}

// ---------------------------------------------------------------------------
// Synthetic families

TEST(Family, SurfacePeriodsMatchDecomposition) {
    for (FamilyKind k : {FamilyKind::TwoLevel, FamilyKind::ThreeLevel, FamilyKind::Horizontal}) {
        FamilySpec spec;
        spec.kind = k;
        for (double t : {0.1, 1e-3, 1e-5}) {
            PlumbingParams P;
            P.t[-1] = t;
            P.t[-2] = 0.05;
            P.t_h[0] = t;
            const FamilyPoint F = assemble_synthetic_family(spec, P);
            ASSERT_TRUE(F.concrete);
            EXPECT_TRUE(validate_surface(F.surface, F.signature, 1e-8).ok());
            for (size_t i = 0; i < F.cycles.size(); ++i)
                EXPECT_NEAR(std::abs(F.cycles[i].total() - F.surface_periods[i]), 0.0, 1e-12)
                    << F.cycles[i].name << " t=" << t;
        }
    }
}

TEST(Family, BottomPeriodsScaleWithT) {
    FamilySpec spec;
    PlumbingParams P;
    P.t[-1] = 1e-3;
    const FamilyPoint F = assemble_synthetic_family(spec, P);
    EXPECT_NEAR(std::abs(F.surface_periods[2] - 1e-3 * spec.slit), 0.0, 1e-15);
}

TEST(Family, HorizontalCrossGrowsLikeLog) {
    FamilySpec spec;
    spec.kind = FamilyKind::Horizontal;
    PlumbingParams P1, P2;
    P1.t_h[0] = 1e-3;
    P2.t_h[0] = 1e-6;
    const cplx d1 = assemble_synthetic_family(spec, P1).surface_periods[3];
    const cplx d2 = assemble_synthetic_family(spec, P2).surface_periods[3];
    const cplx r = spec.slit / cplx(0.0, 2 * kPi);
    EXPECT_NEAR(std::abs((d2 - d1) - r * std::log(1e-3)), 0.0, 1e-12);
}

TEST(Family, LargeTIsRejected) {
    FamilySpec spec;
    PlumbingParams P;
    P.t[-1] = 1.5;
    EXPECT_THROW(assemble_synthetic_family(spec, P), ConfigError);
}

TEST(Expansion, TwoLevelHasNoLogTerm) {
    FamilySpec spec;
    const ExpansionReport R = verify_period_expansion(spec, 4, geometric_grid(1e-1, 1e-5, 4));
    EXPECT_LT(std::abs(R.expansion.g_coeff), 1e-8);
    EXPECT_NEAR(std::abs(R.expansion.c + spec.p), 0.0, 1e-10);
}

TEST(Expansion, ResidueFamilyRecoversMinusROverB) {
    for (int b : {1, 2, 3}) {
        FamilySpec spec;
        spec.kind = FamilyKind::Residue;
        spec.b = b;
        spec.p = 0.9;
        spec.residue = cplx(0.3, -0.4);
        const ExpansionReport R = verify_period_expansion(spec, 0, geometric_grid(1e-1, 1e-5, 4));
        EXPECT_NEAR(std::abs(R.expansion.g_coeff + spec.residue / static_cast<double>(b)), 0.0, 1e-6) << b;
    }
}

TEST(Expansion, RemainderShrinks) {
    FamilySpec spec;
    spec.kind = FamilyKind::Residue;
    spec.b = 2;
    spec.p = 0.9;
    spec.residue = 0.3;
    spec.residue_slope = cplx(0.5, -0.2);
    const ExpansionReport R = verify_period_expansion(spec, 0, geometric_grid(1e-1, 1e-5, 6));
    EXPECT_TRUE(R.residual_decreasing);
    EXPECT_LT(R.windows.back().residual_over_t, 1e-3);
}

TEST(Expansion, GridIsGeometric) {
    const auto g = geometric_grid(1e-1, 1e-3, 3);
    ASSERT_EQ(g.size(), 7u);
    EXPECT_NEAR(g.back(), 1e-3, 1e-15);
    EXPECT_NEAR(g[1] / g[0], std::pow(10.0, -1.0 / 3), 1e-12);
    EXPECT_THROW(geometric_grid(1e-3, 1e-1, 3), ConfigError);
}

// ---------------------------------------------------------------------------
// Non-injectivity

TEST(Noninj, OppositeTHaveEqualPeriods) {
    const NoninjReport R = reproduce_noninjectivity(h31_graph(2), cplx(0.05, 0.0), 2000, 3);
    EXPECT_LT(R.period_distance, 1e-12);
    EXPECT_NEAR(R.coordinate_distance, 0.1, 1e-15);
    EXPECT_FALSE(R.same_sector_possible);
    EXPECT_GT(R.min_sampled_distance, 1e-8);
}

TEST(Noninj, NeedsAEqualTwo) {
    EXPECT_THROW(reproduce_noninjectivity(h22_graph(), 0.05, 10, 1), ConfigError);
}

TEST(Noninj, PeriodsAreEvenInT) {
    const std::vector<cplx> s = {0.01, 0.02, -0.01, 0.0, 0.03, 0.01, -0.02};
    const cplx t(0.02, 0.03);
    EXPECT_LT((h31_periods(s, t) - h31_periods(s, -t)).norm(), 1e-15);
    EXPECT_GT((h31_periods(s, t) - h31_periods(s, cplx(0, 1) * t)).norm(), 1e-5);
}
