#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "flatreg/errors.hpp"
#include "flatreg/rng.hpp"
#include "flatreg/sampler.hpp"

using namespace flatreg;

namespace {

// Frozen oracle values (adaptive quadrature, default options).
constexpr double kOracle0025 = 5.8143780800e-05;
constexpr double kOracle005 = 9.2969565220e-04;
constexpr double kOracle01 = 1.4840586683e-02;
constexpr double kOracle02 = 2.3527752171e-01;
constexpr double kFullCone = 5.4475960461e+01;

ConingEstimate torus_estimate(double eps, long N, std::uint64_t seed, int threads = 1) {
    const ChartModel chart = build_torus_chart();
    SamplerOptions opt;
    opt.threads = threads;
    return estimate_coned_measure(chart, LinearSubspace::full(chart.dim), {eps}, N, seed, opt);
}

} // namespace

TEST(Rng, SameKeySameStream) {
    CounterRng a(7, 123), b(7, 123), c(7, 124);
    for (int i = 0; i < 5; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
    }
}

TEST(Rng, UniformRange) {
    CounterRng r(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Charts, TorusBoxVolume) { EXPECT_DOUBLE_EQ(build_torus_chart(2.0).box_volume(), 256.0); }

TEST(Charts, UnknownNameIsConfigError) { EXPECT_THROW(chart_by_name("klein"), ConfigError); }

TEST(Charts, OctagonSamplesValidateInH2) {
    const ChartModel chart = build_h2_octagon_chart(0.5);
    int built = 0;
    for (std::uint64_t i = 0; i < 400 && built < 20; ++i) {
        CounterRng r(3, i);
        Eigen::VectorXcd z(chart.dim);
        for (int j = 0; j < chart.dim; ++j) {
            const auto& b = chart.box[j];
            z[j] = cplx(r.uniform(b.re_lo, b.re_hi), r.uniform(b.im_lo, b.im_hi));
        }
        if (!chart.admissible(z)) continue;
        const TranslationSurface X = chart.build(z);
        const ValidationReport rep = validate_surface(X, chart.signature, 1e-8);
        EXPECT_TRUE(rep.ok());
        EXPECT_NEAR(area(X), chart.area(z), 1e-10);
        ++built;
    }
    EXPECT_EQ(built, 20);
}

TEST(Lattice, SuccessiveMinimaOfSquare) {
    const auto [a, b] = successive_minima(1.0, cplx(0.0, 1.0));
    EXPECT_NEAR(a, 1.0, 1e-12);
    EXPECT_NEAR(b, 1.0, 1e-12);
    const auto [c, d] = successive_minima(cplx(3.0, 1.0), cplx(2.0, 1.0));  // basis of Z^2
    EXPECT_NEAR(c, 1.0, 1e-12);
    EXPECT_NEAR(d, 1.0, 1e-12);
}

TEST(Oracle, FrozenValues) {
    EXPECT_NEAR(torus_exact_oracle({0.025}).value, kOracle0025, 1e-6 * kOracle0025);
    EXPECT_NEAR(torus_exact_oracle({0.1}).value, kOracle01, 1e-6 * kOracle01);
    EXPECT_NEAR(torus_exact_oracle({0.2}).value, kOracle02, 1e-6 * kOracle02);
}

TEST(Oracle, SaturatesAtFullCone) {
    const OracleValue a = torus_exact_oracle({2.0}), b = torus_exact_oracle({3.0});
    EXPECT_NEAR(a.value, kFullCone, 1e-6 * kFullCone);
    EXPECT_DOUBLE_EQ(a.value, b.value);
}

// The saturated value is the box measure of {0 < area <= 1}; sample it directly.
TEST(Oracle, FullConeMatchesDirectSampling) {
    const long N = 1000000;
    long hits = 0;
    for (long i = 0; i < N; ++i) {
        CounterRng r(99, static_cast<std::uint64_t>(i));
        const cplx u(r.uniform(-2, 2), r.uniform(-2, 2)), v(r.uniform(-2, 2), r.uniform(-2, 2));
        const double A = u.real() * v.imag() - u.imag() * v.real();
        hits += A > 0.0 && A <= 1.0;
    }
    const double p = static_cast<double>(hits) / N;
    const double est = 256.0 * p, se = 256.0 * std::sqrt(p * (1 - p) / N);
    EXPECT_NEAR(est, kFullCone, 4.0 * se);
}

TEST(Oracle, HalvingRatioNearSixteen) {
    // the bounded box cuts the cusp off, leaving the eps^4 regime
    EXPECT_NEAR(kOracle01 / kOracle005, 16.0, 0.2);
    EXPECT_NEAR(kOracle02 / kOracle01, 16.0, 0.3);
}

TEST(Oracle, TwoConnectionsNeedProductAtLeastOne) {
    EXPECT_EQ(torus_exact_oracle({0.1, 0.1}).value, 0.0);
    EXPECT_EQ(torus_exact_oracle({0.5, 1.9}).value, 0.0);
}

TEST(Oracle, RejectsBadInput) {
    EXPECT_THROW(torus_exact_oracle({}), ConfigError);
    EXPECT_THROW(torus_exact_oracle({-0.1}), ConfigError);
}

TEST(Sampler, AgreesWithOracle) {
    const ConingEstimate e = torus_estimate(0.2, 400000, 11);
    ASSERT_GT(e.hits, 100);
    const double se = std::hypot(e.standard_error, 6.2e-5);
    EXPECT_NEAR(e.value, kOracle02, 4.0 * se);
}

TEST(Sampler, ThreadCountDoesNotChangeResult) {
    const ConingEstimate a = torus_estimate(0.3, 60000, 5, 1), b = torus_estimate(0.3, 60000, 5, 3);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.standard_error, b.standard_error);
    EXPECT_EQ(a.hits, b.hits);
}

TEST(Sampler, GridMatchesSingleRuns) {
    const ChartModel chart = build_torus_chart();
    const auto grid = estimate_coned_measure_grid(chart, LinearSubspace::full(2), {{0.3}, {0.5}}, 30000, 8);
    EXPECT_EQ(grid[1].value, torus_estimate(0.5, 30000, 8).value);
}

TEST(Sampler, MonotoneInEps) {
    const ChartModel chart = build_torus_chart();
    const auto g = estimate_coned_measure_grid(chart, LinearSubspace::full(2), {{0.2}, {0.4}, {0.8}}, 50000, 2);
    EXPECT_LE(g[0].value, g[1].value);
    EXPECT_LE(g[1].value, g[2].value);
}

TEST(Sampler, RejectsNonpositiveSamples) {
    const ChartModel chart = build_torus_chart();
    EXPECT_THROW(estimate_coned_measure(chart, LinearSubspace::full(2), {0.1}, 0, 1), ConfigError);
}

TEST(Fit, RecoversExactPowerLaw) {
    std::vector<std::pair<std::vector<double>, ConingEstimate>> rows;
    for (double e : {0.025, 0.05, 0.1, 0.2}) {
        ConingEstimate c;
        c.value = 3.0 * e * e;
        c.standard_error = 0.01 * c.value;
        rows.push_back({{e}, c});
    }
    const ScalingFit f = fit_scaling_exponent(rows);
    EXPECT_NEAR(f.slopes[0], 2.0, 1e-9);
    EXPECT_NEAR(f.joint_slope, 2.0, 1e-9);
    EXPECT_TRUE(f.precondition_ok);
}

TEST(Fit, PerAxisSlopesOnProductGrid) {
    std::vector<std::pair<std::vector<double>, ConingEstimate>> rows;
    for (double a : {0.05, 0.1, 0.2, 0.4})
        for (double b : {0.05, 0.1, 0.2, 0.4}) {
            ConingEstimate c;
            c.value = a * a * b * b * b;
            c.standard_error = 0.02 * c.value;
            rows.push_back({{a, b}, c});
        }
    const ScalingFit f = fit_scaling_exponent(rows);
    EXPECT_NEAR(f.slopes[0], 2.0, 1e-9);
    EXPECT_NEAR(f.slopes[1], 3.0, 1e-9);
    EXPECT_NEAR(f.joint_slope, 2.5, 1e-9);
}

TEST(Fit, FlagsThinGrids) {
    std::vector<std::pair<std::vector<double>, ConingEstimate>> rows;
    for (double e : {0.05, 0.1, 0.2}) {
        ConingEstimate c;
        c.value = e * e;
        c.standard_error = 0.5 * c.value;
        rows.push_back({{e}, c});
    }
    EXPECT_FALSE(fit_scaling_exponent(rows).precondition_ok);
}

TEST(Fit, ZeroEstimateIsRuntimeError) {
    std::vector<std::pair<std::vector<double>, ConingEstimate>> rows(2);
    rows[0] = {{0.1}, ConingEstimate{}};
    rows[1] = {{0.2}, ConingEstimate{1.0, 0.1, 10, 0, 5}};
    EXPECT_THROW(fit_scaling_exponent(rows), RuntimeError);
}

TEST(Threads, EnvironmentDefault) {
    ::setenv("FLATREG_THREADS", "3", 1);
    EXPECT_EQ(default_thread_count(), 3);
    ::setenv("FLATREG_THREADS", "junk", 1);
    EXPECT_EQ(default_thread_count(), 1);
    ::unsetenv("FLATREG_THREADS");
}
