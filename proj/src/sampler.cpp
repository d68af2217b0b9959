#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "flatreg/errors.hpp"
#include "flatreg/rng.hpp"
#include "flatreg/sampler.hpp"

namespace flatreg {

int default_thread_count() {
    if (const char* s = std::getenv("FLATREG_THREADS")) {
        const int n = std::atoi(s);
        if (n > 0) return n;
    }
    return 1;
}

namespace {

bool search(const std::vector<SaddleConnection>& conns, const std::vector<double>& eps,
            const LinearSubspace& W, std::vector<int>& chosen, std::vector<Eigen::VectorXi>& classes) {
    const size_t i = chosen.size();
    if (i == eps.size()) return true;
    for (int c = 0; c < static_cast<int>(conns.size()); ++c) {
        if (std::abs(conns[c].holonomy) > eps[i]) break;  // sorted by length
        if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
        classes.push_back(conns[c].cls);
        if (independence_rank(classes, W) == static_cast<int>(classes.size())) {
            chosen.push_back(c);
            if (search(conns, eps, W, chosen, classes)) return true;
            chosen.pop_back();
        }
        classes.pop_back();
    }
    return false;
}

} // namespace

bool has_independent_connections(const std::vector<SaddleConnection>& conns, const std::vector<double>& eps,
                                 const LinearSubspace& W) {
    std::vector<double> e = eps;
    std::sort(e.begin(), e.end());
    if (std::isinf(e.back())) {
        // unbounded slots can always be filled while the rank allows it
        const int finite = static_cast<int>(std::count_if(e.begin(), e.end(), [](double x) { return !std::isinf(x); }));
        e.resize(finite);
        if (static_cast<int>(eps.size()) > W.dim()) return false;
    }
    std::vector<int> chosen;
    std::vector<Eigen::VectorXi> classes;
    return search(conns, e, W, chosen, classes);
}

std::vector<ConingEstimate> estimate_coned_measure_grid(const ChartModel& chart, const LinearSubspace& W,
                                                        const std::vector<std::vector<double>>& eps_grid,
                                                        long N, std::uint64_t seed, const SamplerOptions& opt,
                                                        SamplerDiagnostics* diag) {
    if (eps_grid.empty()) throw ConfigError("empty epsilon grid");
    if (N < 1000) throw ConfigError("at least 1000 samples are required");
    for (const auto& e : eps_grid) {
        if (e.empty()) throw ConfigError("empty epsilon vector");
        for (double x : e)
            if (!(x > 0.0)) throw ConfigError("epsilon values must be positive");
    }
    if (W.ambient_dim != chart.dim) throw ConfigError("subspace dimension does not match the chart");
    const bool full = W.dim() == chart.dim && W.basis.isApprox(Eigen::MatrixXcd::Identity(chart.dim, chart.dim));

    double L = 0.0;
    bool any_finite = false;
    for (const auto& e : eps_grid)
        for (double x : e)
            if (!std::isinf(x)) {
                L = std::max(L, x);
                any_finite = true;
            }

    const int G = static_cast<int>(eps_grid.size());
    const int threads = std::max(1, opt.threads);
    struct Tally {
        std::vector<long> hits;
        long in_box = 0, admissible = 0, small = 0;
        std::exception_ptr error;
    };
    std::vector<Tally> tallies(threads);
    for (auto& t : tallies) t.hits.assign(G, 0);

    const int d = W.dim();
    auto work = [&](int tid, long begin, long end) {
        Tally& tally = tallies[tid];
        try {
            Eigen::VectorXcd z(chart.dim), c(d);
            EnumerateOptions eo;
            eo.node_budget = opt.node_budget;
            eo.chains = false;
            for (long i = begin; i < end; ++i) {
                CounterRng rng(seed, static_cast<std::uint64_t>(i));
                if (full) {
                    for (int q = 0; q < chart.dim; ++q) {
                        const auto& r = chart.box[q];
                        const double x = rng.uniform(r.re_lo, r.re_hi);
                        z[q] = cplx(x, rng.uniform(r.im_lo, r.im_hi));
                    }
                } else {
                    const double h = opt.coefficient_half_width;
                    for (int q = 0; q < d; ++q) {
                        const double x = rng.uniform(-h, h);
                        c[q] = cplx(x, rng.uniform(-h, h));
                    }
                    z = W.basis.transpose() * c;
                    bool inside = true;
                    for (int q = 0; q < chart.dim && inside; ++q) inside = chart.box[q].contains(z[q]);
                    if (!inside) continue;
                }
                ++tally.in_box;
                if (!chart.admissible(z)) continue;
                ++tally.admissible;
                const double A = chart.area(z);
                if (!(A > 0.0 && A <= 1.0)) continue;
                ++tally.small;
                std::vector<SaddleConnection> conns;
                if (any_finite) {
                    const TranslationSurface Y = scaled(chart.build(z), 1.0 / std::sqrt(A));
                    conns = enumerate_saddle_connections(Y, L, eo);
                }
                for (int g = 0; g < G; ++g)
                    if (has_independent_connections(conns, eps_grid[g], W)) ++tally.hits[g];
            }
        } catch (...) {
            tally.error = std::current_exception();
        }
    };

    if (threads == 1) {
        work(0, 0, N);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            const long b = N * t / threads, e = N * (t + 1) / threads;
            pool.emplace_back(work, t, b, e);
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& t : tallies)
        if (t.error) std::rethrow_exception(t.error);

    std::vector<long> hits(G, 0);
    long in_box = 0, admissible = 0, small = 0;
    for (const auto& t : tallies) {
        for (int g = 0; g < G; ++g) hits[g] += t.hits[g];
        in_box += t.in_box;
        admissible += t.admissible;
        small += t.small;
    }

    const double vol = full ? chart.box_volume() : std::pow(2.0 * opt.coefficient_half_width, 2 * d);
    std::vector<ConingEstimate> out;
    for (int g = 0; g < G; ++g) {
        const double p = static_cast<double>(hits[g]) / static_cast<double>(N);
        ConingEstimate est;
        est.value = p * vol;
        est.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(N)) * vol;
        est.samples = N;
        est.seed = seed;
        est.hits = hits[g];
        out.push_back(est);
    }
    if (diag) {
        diag->drawn = N;
        diag->in_box = in_box;
        diag->admissible = admissible;
        diag->unit_area = small;
        if (in_box > 0 && static_cast<double>(admissible) < 0.01 * static_cast<double>(in_box))
            diag->warnings.push_back("over 99% of samples are inadmissible; the box is poorly chosen");
    }
    return out;
}

ConingEstimate estimate_coned_measure(const ChartModel& chart, const LinearSubspace& W,
                                      const std::vector<double>& eps, long N, std::uint64_t seed,
                                      const SamplerOptions& opt) {
    return estimate_coned_measure_grid(chart, W, {eps}, N, seed, opt).front();
}

} // namespace flatreg
