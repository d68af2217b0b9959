#include <cmath>
#include <algorithm>
#include <limits>
#include <numbers>

#include <Eigen/QR>

#include "flatreg/errors.hpp"
#include "flatreg/multiscale.hpp"
#include "flatreg/rng.hpp"

namespace flatreg {

namespace {

constexpr double kSecondLevelT = 0.05;  // t_{-2} held fixed while t_{-1} varies

struct Sample {
    cplx t;
    cplx y;  // period / prefactor - pert
};

Sample evaluate(const FamilySpec& spec, int cycle, double modulus, double arg_t) {
    PlumbingParams P;
    P.p = spec.p;
    const cplx t = std::polar(modulus, arg_t);
    LogBranch branch = LogBranch::around(arg_t, 3.0);
    switch (spec.kind) {
    case FamilyKind::TwoLevel: P.t[-1] = t; break;
    case FamilyKind::ThreeLevel:
        P.t[-1] = t;
        P.t[-2] = kSecondLevelT;
        break;
    case FamilyKind::Horizontal: P.t_h[0] = t; break;
    case FamilyKind::Residue: {
        const double b = spec.b;
        P.t[-1] = std::polar(std::pow(modulus, 1.0 / b), arg_t / b);
        branch = LogBranch::around(arg_t / b, 3.0);
        break;
    }
    }
    const FamilyPoint F = assemble_synthetic_family(spec, P, branch);
    if (cycle < 0 || cycle >= static_cast<int>(F.cycles.size()))
        throw ConfigError("cycle index " + std::to_string(cycle) + " out of range");
    const CycleTerms& c = F.cycles[cycle];
    // prefer the period read off the flat surface when there is one
    const cplx period = F.concrete ? F.surface_periods[cycle] : c.total();
    return {F.t, period / c.prefactor - c.pert};
}

// Columns: 1, t, t log t (or 1, t, log t for a horizontal node).
Eigen::MatrixXcd design(const std::vector<Sample>& pts, double arg_t, bool horizontal) {
    Eigen::MatrixXcd A(pts.size(), 3);
    for (size_t i = 0; i < pts.size(); ++i) {
        const cplx t = pts[i].t;
        const cplx logt(std::log(std::abs(t)), arg_t);
        A(i, 0) = 1.0;
        A(i, 1) = t;
        A(i, 2) = horizontal ? logt : t * logt;
    }
    return A;
}

struct Fit {
    Eigen::VectorXcd coef;
    std::vector<double> residual;
};

Fit fit(const std::vector<Sample>& pts, double arg_t, bool horizontal) {
    const Eigen::MatrixXcd A = design(pts, arg_t, horizontal);
    Eigen::VectorXcd y(pts.size());
    Eigen::VectorXd wt(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        y[i] = pts[i].y;
        wt[i] = 1.0 / std::abs(pts[i].t);  // the quantity of interest is residual / |t|
    }
    Eigen::MatrixXcd Aw = wt.asDiagonal() * A;
    // column scaling keeps the small-t columns from being swamped
    Eigen::VectorXd scale(3);
    for (int j = 0; j < 3; ++j) scale[j] = std::max(Aw.col(j).norm(), 1e-300);
    Aw = Aw * scale.cwiseInverse().asDiagonal();
    Fit f;
    f.coef = Aw.colPivHouseholderQr().solve(wt.asDiagonal() * y).cwiseQuotient(scale.cast<cplx>());
    const Eigen::VectorXcd r = y - A * f.coef;
    for (Eigen::Index i = 0; i < r.size(); ++i) f.residual.push_back(std::abs(r[i]));
    return f;
}

} // namespace

std::vector<double> geometric_grid(double hi, double lo, int points_per_decade) {
    if (!(hi > lo && lo > 0.0) || points_per_decade < 1) throw ConfigError("geometric grid needs hi > lo > 0");
    const int n = static_cast<int>(std::lround(std::log10(hi / lo) * points_per_decade));
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(hi * std::pow(10.0, -static_cast<double>(i) / points_per_decade));
    return g;
}

ExpansionReport verify_period_expansion(const FamilySpec& spec, int cycle, const std::vector<double>& t_moduli,
                                        double arg_t) {
    if (t_moduli.size() < 4) throw ConfigError("expansion check needs at least 4 values of t");
    const bool horizontal = spec.kind == FamilyKind::Horizontal;
    std::vector<Sample> pts;
    for (double m : t_moduli) {
        if (!(m > 0.0 && m < 1.0)) throw ConfigError("|t| must lie in (0, 1)");
        pts.push_back(evaluate(spec, cycle, m, arg_t));
    }

    ExpansionReport rep;
    const Fit global = fit(pts, arg_t, horizontal);
    rep.expansion.c = global.coef[0];
    rep.expansion.f_coeff = global.coef[1];
    rep.expansion.g_coeff = global.coef[2];
    for (size_t i = 0; i < pts.size(); ++i) {
        rep.max_residual = std::max(rep.max_residual, global.residual[i]);
        rep.expansion.h_bound = std::max(rep.expansion.h_bound, global.residual[i] / std::abs(pts[i].t));
    }

    // one-decade windows, each fitted on its own
    std::vector<size_t> order(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return std::abs(pts[a].t) > std::abs(pts[b].t); });
    const double top = std::abs(pts[order.front()].t), bottom = std::abs(pts[order.back()].t);
    for (double hi = top; hi / 10.0 >= bottom * (1.0 - 1e-9); hi /= 10.0) {
        std::vector<Sample> w;
        for (size_t i : order) {
            const double m = std::abs(pts[i].t);
            if (m <= hi * (1.0 + 1e-9) && m >= hi / 10.0 * (1.0 - 1e-9)) w.push_back(pts[i]);
        }
        if (w.size() < 4) continue;
        const Fit f = fit(w, arg_t, horizontal);
        ExpansionWindow win;
        win.t_hi = hi;
        win.t_lo = hi / 10.0;
        win.g = f.coef[2];
        for (size_t i = 0; i < w.size(); ++i) {
            win.max_residual = std::max(win.max_residual, f.residual[i]);
            win.residual_over_t = std::max(win.residual_over_t, f.residual[i] / std::abs(w[i].t));
        }
        rep.windows.push_back(win);
    }
    // decreasing up to a floor set by double rounding of O(1) periods
    rep.residual_decreasing = rep.windows.size() >= 2;
    for (size_t i = 1; i < rep.windows.size(); ++i) {
        const double floor = 1e-12 / rep.windows[i].t_lo;
        if (rep.windows[i].residual_over_t > rep.windows[i - 1].residual_over_t + floor)
            rep.residual_decreasing = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Generic base point of the H(3,1) model: four top periods, two bottom periods,
// one relative period, each shifted by the moduli s.
const std::array<cplx, 7> kH31Base = {cplx(1.0, 0.0), cplx(0.2, 1.1), cplx(-0.7, 0.4), cplx(0.3, -0.9),
                                      cplx(1.0, 0.1), cplx(0.1, 0.8), cplx(0.35, 0.15)};
const cplx kH31Lower(0.45, -0.2);

} // namespace

Eigen::VectorXcd h31_periods(const std::vector<cplx>& s, cplx t, cplx p) {
    if (s.size() != 7) throw ConfigError("H(3,1) model takes 7 moduli");
    Eigen::VectorXcd v(7);
    const cplx t2 = t * t;  // a_{-1} = 2 and T = t
    for (int i = 0; i < 4; ++i) v[i] = kH31Base[i] + s[i];
    for (int i = 4; i < 6; ++i) v[i] = t2 * (kH31Base[i] + s[i]);
    v[6] = kH31Base[6] + s[6] + (p * p - t2) / 2.0 + t2 * kH31Lower;
    return v;
}

NoninjReport reproduce_noninjectivity(const EnhancedLevelGraph& G, cplx t, long pairs, std::uint64_t seed,
                                      double eps) {
    const GraphReport gr = validate_graph(G, signature_of(G));
    if (!gr.ok()) throw ConfigError("invalid level graph: " + gr.errors.front());
    if (G.depth() != 1 || G.edges.size() != 1 || G.edges[0].kind != EdgeKind::Vertical)
        throw ConfigError("non-injectivity model needs a two-level graph with one vertical edge");
    if (!(std::abs(t) > 0.0 && std::abs(t) < eps)) throw ConfigError("need 0 < |t| < eps");
    if (pairs < 0) throw ConfigError("pair count must be nonnegative");

    NoninjReport rep;
    const auto a = compute_a(G);
    rep.a = a.at(-1);
    const int b = G.edges[0].enhancement;
    if (rep.a != 2 || b != 2) throw ConfigError("the H(3,1) model needs a = b = 2 on level -1");

    const std::vector<cplx> s0(7, 0.0);
    rep.t1 = t;
    rep.t2 = -t;
    rep.period_distance = (h31_periods(s0, rep.t1) - h31_periods(s0, rep.t2)).norm();
    rep.coordinate_distance = std::abs(rep.t1 - rep.t2);

    MultiSector S = make_sector(G, eps, {{-1, std::arg(t) - 0.5 * std::numbers::pi / 8.0}});
    const double width = S.vertical_width(-1);
    double gap = std::abs(std::remainder(std::arg(rep.t2) - std::arg(rep.t1), 2.0 * std::numbers::pi));
    rep.same_sector_possible = gap < width;

    // pairs of points in the sector holding t; odd pairs share their moduli
    rep.sampled_pairs = pairs;
    rep.min_sampled_distance = pairs > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    const double lo = S.vertical_lo.at(-1);
    for (long i = 0; i < pairs; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        auto draw_t = [&] {
            const double r = eps * std::sqrt(rng.uniform());
            return std::polar(std::max(r, 1e-300), lo + width * (0.02 + 0.96 * rng.uniform()));
        };
        auto draw_s = [&] {
            std::vector<cplx> s(7);
            for (auto& z : s) z = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) * (eps / std::sqrt(2.0));
            return s;
        };
        const cplx ta = draw_t(), tb = draw_t();
        const auto sa = draw_s();
        const auto sb = (i % 2 == 1) ? sa : draw_s();
        const double d = (h31_periods(sa, ta) - h31_periods(sb, tb)).norm();
        rep.min_sampled_distance = std::min(rep.min_sampled_distance, d);
    }
    return rep;
}

} // namespace flatreg
