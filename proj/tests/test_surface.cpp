#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "flatreg/errors.hpp"
#include "flatreg/surface.hpp"

using namespace flatreg;
using fixtures::octagon;
using fixtures::primitive_vectors;
using fixtures::torus;

namespace {

const StratumSignature kTorus{{0}};
const StratumSignature kH2{{2}};

std::vector<cplx> holonomies(const std::vector<SaddleConnection>& v) {
    std::vector<cplx> h;
    for (const auto& s : v) h.push_back(s.holonomy);
    return h;
}

// Multiset equality up to an absolute tolerance.
bool same_vectors(std::vector<cplx> a, std::vector<cplx> b, double tol) {
    if (a.size() != b.size()) return false;
    auto key = [](cplx x, cplx y) {
        if (std::abs(x.real() - y.real()) > 1e-7) return x.real() < y.real();
        return x.imag() < y.imag();
    };
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

std::vector<cplx> regular_octagon_sides() {
    std::vector<cplx> z;
    for (int k = 0; k < 4; ++k)
        z.push_back(std::polar(1.0, std::numbers::pi * (k + 1) / 4) - std::polar(1.0, std::numbers::pi * k / 4));
    return z;
}

} // namespace

TEST(Validate, SquareTorus) {
    const auto X = torus(1.0, cplx(0, 1));
    const auto rep = validate_surface(X, kTorus);
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.genus, 1);
    EXPECT_DOUBLE_EQ(area(X), 1.0);
}

TEST(Validate, OctagonInH2) {
    const std::vector<cplx> z = {1.0, cplx(1, 1), cplx(0, 1), cplx(-1, 1)};
    const auto X = octagon(z);
    const auto rep = validate_surface(X, kH2);
    EXPECT_TRUE(rep.ok()) << (rep.metric.empty() ? "" : rep.metric.front());
    EXPECT_EQ(rep.genus, 2);
    std::vector<cplx> sides = z;
    for (cplx w : z) sides.push_back(-w);
    EXPECT_NEAR(area(X), signed_polygon_area(polygon_vertices(sides)), 1e-12);
    EXPECT_EQ(X.num_triangles(), 6);
}

TEST(Validate, RegularOctagonArea) {
    const auto X = octagon(regular_octagon_sides());
    EXPECT_TRUE(validate_surface(X, kH2).ok());
    EXPECT_NEAR(area(X), 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(Validate, PerturbedEdgeBreaksClosure) {
    auto X = torus(1.0, cplx(0, 1));
    X.triangles[0].e[0] = 1.1;
    const auto rep = validate_surface(X, kTorus);
    EXPECT_TRUE(rep.structural.empty());
    ASSERT_FALSE(rep.metric.empty());
    EXPECT_NE(rep.metric.front().find("closure"), std::string::npos);
}

TEST(Validate, DanglingGluingIsStructural) {
    auto X = torus(1.0, cplx(0, 1));
    const int p = X.glue[0];
    X.glue[0] = -1;
    X.glue[p] = -1;
    const auto rep = validate_surface(X, kTorus);
    EXPECT_FALSE(rep.structural.empty());
}

TEST(Validate, WrongConeAngleIsMetric) {
    auto X = octagon(regular_octagon_sides());
    X.zeros.clear();
    const auto rep = validate_surface(X, StratumSignature{{0}});
    EXPECT_TRUE(rep.structural.empty());
    EXPECT_FALSE(rep.metric.empty());
}

TEST(Area, ScalesQuadratically) {
    const auto X = torus(1.0, cplx(0.5, 2.0));
    EXPECT_NEAR(area(X), 2.0, 1e-14);
    EXPECT_NEAR(area(scaled(X, 0.3)), 0.09 * 2.0, 1e-14);
}

TEST(Enumerate, SquareTorusShortVectors) {
    const auto X = torus(1.0, cplx(0, 1));
    const auto sc = enumerate_saddle_connections(X, 1.5);
    EXPECT_TRUE(same_vectors(holonomies(sc), {1.0, cplx(0, 1), cplx(1, 1), cplx(-1, 1)}, 1e-12));
}

TEST(Enumerate, SquareTorusCountAtThirty) {
    const auto X = torus(1.0, cplx(0, 1));
    const auto sc = enumerate_saddle_connections(X, 30.0);
    long lattice = 0;
    for (int p = -30; p <= 30; ++p)
        for (int q = -30; q <= 30; ++q)
            if (std::gcd(std::abs(p), std::abs(q)) == 1 && p * p + q * q <= 900) ++lattice;
    // one entry per +/- pair
    EXPECT_EQ(2 * static_cast<long>(sc.size()), lattice);
}

TEST(Enumerate, BelowShortestIsEmpty) {
    const auto X = octagon(regular_octagon_sides());
    EXPECT_TRUE(enumerate_saddle_connections(X, 0.5).empty());
}

TEST(Enumerate, BudgetOverflowThrows) {
    const auto X = torus(1.0, cplx(0, 1));
    EnumerateOptions opt;
    opt.node_budget = 50;
    EXPECT_THROW(enumerate_saddle_connections(X, 20.0, opt), ResourceError);
}

TEST(Enumerate, LatticeOracleOnRandomTori) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        cplx u(U(rng), U(rng)), v(U(rng), U(rng));
        if (cross(u, v) < 0) std::swap(u, v);
        const double a = cross(u, v);
        if (a < 0.05) continue;
        u /= std::sqrt(a);
        v /= std::sqrt(a);
        const double L = trial == 0 ? 30.0 : 12.0;
        const auto sc = enumerate_saddle_connections(torus(u, v), L);
        EXPECT_TRUE(same_vectors(holonomies(sc), primitive_vectors(u, v, L), 1e-9)) << "trial " << trial;
    }
}

TEST(Enumerate, ChainsReplayToHolonomy) {
    auto X = octagon(regular_octagon_sides());
    make_delaunay(X);
    EnumerateOptions opt;
    opt.delaunay = false;
    for (const auto& s : enumerate_saddle_connections(X, 4.0, opt)) {
        EXPECT_NEAR(std::abs(replay_chain(X, s) - s.holonomy), 0.0, 1e-12);
        EXPECT_GT(std::abs(s.holonomy), 0.0);
    }
}

TEST(Enumerate, ClassesGiveHolonomy) {
    const std::vector<cplx> z = {1.0, cplx(1, 1), cplx(0, 1), cplx(-1, 1)};
    const auto X = octagon(z);
    Eigen::VectorXcd zz(4);
    for (int i = 0; i < 4; ++i) zz[i] = z[i];
    for (const auto& s : enumerate_saddle_connections(X, 5.0)) {
        ASSERT_EQ(s.cls.size(), 4);
        const cplx h = s.cls.cast<cplx>().dot(zz);
        EXPECT_NEAR(std::abs(h - s.holonomy), 0.0, 1e-10);
    }
}

TEST(Enumerate, ScalingEquivariance) {
    const auto X = octagon({1.0, cplx(0.3, 1.1), cplx(-0.2, 0.9), cplx(-0.8, 0.4)});
    ASSERT_TRUE(validate_surface(X, kH2).ok());
    for (double s : {0.37, 2.5}) {
        const auto a = holonomies(enumerate_saddle_connections(X, 3.0));
        auto b = holonomies(enumerate_saddle_connections(scaled(X, s), 3.0 * s));
        for (auto& h : b) h /= s;
        EXPECT_TRUE(same_vectors(a, b, 1e-9));
    }
}

TEST(Enumerate, SL2REquivariance) {
    const auto X = octagon({1.0, cplx(0.3, 1.1), cplx(-0.2, 0.9), cplx(-0.8, 0.4)});
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0.0, 0.05);
    const double L = 3.0;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::Matrix2d g;
        g << 1 + N(rng), N(rng), N(rng), 1 + N(rng);
        g /= std::sqrt(g.determinant());
        std::vector<cplx> lhs, rhs;
        for (const auto& s : enumerate_saddle_connections(transformed(X, g), L)) lhs.push_back(s.holonomy);
        for (const auto& s : enumerate_saddle_connections(X, 2.0 * L)) {
            const Eigen::Vector2d w = g * Eigen::Vector2d(s.holonomy.real(), s.holonomy.imag());
            cplx h(w[0], w[1]);
            if (std::abs(h) > L) continue;
            if (h.imag() < 0 || (h.imag() == 0 && h.real() < 0)) h = -h;
            rhs.push_back(h);
        }
        // drop entries within roundoff of the threshold on either side
        auto trim = [&](std::vector<cplx>& v) {
            v.erase(std::remove_if(v.begin(), v.end(), [&](cplx h) { return std::abs(std::abs(h) - L) < 1e-9; }),
                    v.end());
        };
        trim(lhs);
        trim(rhs);
        EXPECT_TRUE(same_vectors(lhs, rhs, 1e-9)) << "trial " << trial;
    }
}

TEST(Parallel, Basics) {
    EXPECT_TRUE(are_parallel(cplx(1, 0), cplx(2, 0)));
    EXPECT_FALSE(are_parallel(cplx(1, 0), cplx(0, 1)));
    EXPECT_TRUE(are_parallel(cplx(1, 1), cplx(2, 2.000000000001), 1e-9));
    EXPECT_FALSE(are_parallel(cplx(1, 1), cplx(2, 2.000000000001), 1e-15));
}

TEST(Rank, IndependenceRank) {
    const auto W = LinearSubspace::full(4);
    Eigen::VectorXi a(4), b(4);
    a << 1, 0, 0, 0;
    b << 0, 1, 0, 0;
    EXPECT_EQ(independence_rank({a, b}, W), 2);
    EXPECT_EQ(independence_rank({a, a, a}, W), 1);
    EXPECT_THROW(independence_rank({Eigen::VectorXi::Ones(3)}, W), ConfigError);
}

TEST(Rank, ParallelTorusClassesOnRealSubspace) {
    // real-coefficient W of full support: the chart itself with real basis
    LinearSubspace W = LinearSubspace::full(2);
    Eigen::VectorXi a(2), b(2);
    a << 2, 3;
    b << 4, 6;
    EXPECT_EQ(independence_rank({a, b}, W), 1);
}

TEST(Rank, NonParallelImpliesIndependent) {
    const auto X = octagon({1.0, cplx(0.3, 1.1), cplx(-0.2, 0.9), cplx(-0.8, 0.4)});
    const auto sc = enumerate_saddle_connections(X, 2.0);
    const auto W = LinearSubspace::full(4);
    int checked = 0;
    for (size_t i = 0; i < sc.size(); ++i)
        for (size_t j = i + 1; j < sc.size(); ++j) {
            if (are_parallel(sc[i], sc[j], 1e-9)) continue;
            EXPECT_EQ(independence_rank({sc[i].cls, sc[j].cls}, W), 2);
            ++checked;
        }
    EXPECT_GT(checked, 10);
}

TEST(Periods, RecoveredFromEdges) {
    const std::vector<cplx> z = {1.0, cplx(0.3, 1.1), cplx(-0.2, 0.9), cplx(-0.8, 0.4)};
    const auto p = period_vector(octagon(z));
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(p[i] - z[i]), 0.0, 1e-12);
}

TEST(Json, RoundTripIsBitExact) {
    auto X = octagon({1.0, cplx(0.3, 1.1), cplx(-0.2, 0.9), cplx(-0.8, 0.4)});
    X.triangles[0].e[0] *= 1.0 + 1e-15;
    const std::string text = to_json(X);
    const auto Y = surface_from_json(text);
    EXPECT_EQ(to_json(Y), text);
    for (int t = 0; t < X.num_triangles(); ++t)
        for (int k = 0; k < 3; ++k) EXPECT_EQ(X.triangles[t].e[k], Y.triangles[t].e[k]);
    EXPECT_EQ(X.glue, Y.glue);
    EXPECT_EQ(X.zeros, Y.zeros);
    EXPECT_EQ(X.edge_class, Y.edge_class);
}

TEST(Json, MissingKeyIsConfigError) {
    EXPECT_THROW(surface_from_json(R"({"triangles": []})"), ConfigError);
}

TEST(Polygon, Simplicity) {
    EXPECT_TRUE(is_simple_polygon(polygon_vertices({1.0, cplx(0, 1), -1.0, cplx(0, -1)})));
    EXPECT_FALSE(is_simple_polygon(polygon_vertices({1.0, -1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0})));
    EXPECT_FALSE(is_simple_polygon(polygon_vertices({1.0, cplx(-1, 1), 1.0, cplx(-1, -1)})));
}
