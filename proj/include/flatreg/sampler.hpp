#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "flatreg/surface.hpp"

namespace flatreg {

struct ComplexRange {
    double re_lo, re_hi, im_lo, im_hi;
    double volume() const { return (re_hi - re_lo) * (im_hi - im_lo); }
    bool contains(cplx z) const {
        return re_lo <= z.real() && z.real() <= re_hi && im_lo <= z.imag() && z.imag() <= im_hi;
    }
};

struct ChartModel {
    std::string name;
    int dim = 0;
    StratumSignature signature;
    std::vector<ComplexRange> box;
    std::function<bool(const Eigen::VectorXcd&)> admissible;
    std::function<double(const Eigen::VectorXcd&)> area;  // of the built surface, without building it
    std::function<TranslationSurface(const Eigen::VectorXcd&)> build;

    double box_volume() const;
    void set_box(double half_width);
};

ChartModel build_torus_chart(double half_width = 2.0);
ChartModel build_h2_octagon_chart(double half_width = 2.0);
ChartModel chart_by_name(const std::string& name, double half_width = 2.0);

struct ConingEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    long samples = 0;
    std::uint64_t seed = 0;
    long hits = 0;
};

struct SamplerOptions {
    int threads = 1;
    long node_budget = 1000000;
    double coefficient_half_width = 2.0;  // box for W coordinates when W is not the full chart
};

struct SamplerDiagnostics {
    long drawn = 0;
    long in_box = 0;         // W samples landing in the chart box
    long admissible = 0;
    long unit_area = 0;      // admissible with 0 < area <= 1
    std::vector<std::string> warnings;
};

// One sample stream evaluated against several epsilon vectors at once.
// Infinite entries make the connection requirement vacuous.
std::vector<ConingEstimate> estimate_coned_measure_grid(const ChartModel& chart, const LinearSubspace& W,
                                                        const std::vector<std::vector<double>>& eps_grid,
                                                        long N, std::uint64_t seed,
                                                        const SamplerOptions& opt = {},
                                                        SamplerDiagnostics* diag = nullptr);

ConingEstimate estimate_coned_measure(const ChartModel& chart, const LinearSubspace& W,
                                      const std::vector<double>& eps, long N, std::uint64_t seed,
                                      const SamplerOptions& opt = {});

// True if k distinct connections with |s_i| <= eps_i have W-independent classes.
bool has_independent_connections(const std::vector<SaddleConnection>& conns, const std::vector<double>& eps,
                                 const LinearSubspace& W);

struct OracleValue {
    double value = 0.0;
    double error = 0.0;  // quadrature plus truncation estimate
};

struct OracleOptions {
    int resolution = 48;         // cells per axis for the lattice-reduction fallback
    int inner_resolution = 160;
    int max_denominator = 100;
    double tolerance = 1e-4;     // relative, for adaptive quadrature
    double half_width = 2.0;
};

OracleValue torus_exact_oracle(const std::vector<double>& eps, const OracleOptions& opt = {});

// Successive minima of the lattice Zu + Zv.
std::pair<double, double> successive_minima(cplx u, cplx v);

struct ScalingFit {
    std::vector<double> slopes;
    std::vector<double> slope_se;
    std::vector<double> ci_low, ci_high;  // 95% two-sided
    double intercept = 0.0;
    double joint_slope = 0.0;             // slope against log of the product of eps
    double joint_se = 0.0;
    double r2 = 0.0;
    bool precondition_ok = true;
    std::string note;
};

ScalingFit fit_scaling_exponent(const std::vector<std::pair<std::vector<double>, ConingEstimate>>& results);

int default_thread_count();

} // namespace flatreg
