#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "flatreg/errors.hpp"
#include "flatreg/multiscale.hpp"

namespace flatreg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

LogBranch::LogBranch(double lo, double width) : lo_(lo), width_(width) {
    if (!(width > 0.0 && width < kTwoPi)) throw ConfigError("a log branch arc must have width in (0, 2*pi)");
}

LogBranch LogBranch::around(double center, double width) { return LogBranch(center - 0.5 * width, width); }

LogBranch LogBranch::containing(cplx z) { return around(std::arg(z), std::numbers::pi); }

bool LogBranch::contains_arg(cplx z) const {
    if (z == cplx(0.0)) return false;
    const double theta = std::arg(z);
    const double k = std::ceil((lo_ - theta) / kTwoPi - 1e-12);
    const double lifted = theta + k * kTwoPi;
    return lifted <= lo_ + width_ + 1e-12;
}

double LogBranch::lift_arg(cplx z) const {
    if (z == cplx(0.0)) throw BranchError("log of zero");
    const double theta = std::arg(z);
    const double k = std::ceil((lo_ - theta) / kTwoPi - 1e-12);
    const double lifted = theta + k * kTwoPi;
    if (lifted > lo_ + width_ + 1e-12)
        throw BranchError("argument " + std::to_string(theta) + " lies outside the branch arc [" + std::to_string(lo_) +
                          ", " + std::to_string(lo_ + width_) + "]");
    return lifted;
}

cplx LogBranch::log(cplx z) const { return {std::log(std::abs(z)), lift_arg(z)}; }

double MultiSector::vertical_width(int level) const {
    const auto it = a.find(level);
    const int ai = it == a.end() ? 1 : it->second;
    return horizontal_width() / ai;
}

bool MultiSector::contains(const PlumbingParams& P) const {
    auto inside = [&](cplx t, double lo, double width) {
        const double r = std::abs(t);
        if (!(r > 0.0 && r < eps)) return false;
        const double theta = std::arg(t);
        const double k = std::ceil((lo - theta) / kTwoPi);
        const double lifted = theta + k * kTwoPi;
        return lifted > lo && lifted < lo + width;
    };
    for (const auto& [level, lo] : vertical_lo) {
        const auto it = P.t.find(level);
        if (it == P.t.end() || !inside(it->second, lo, vertical_width(level))) return false;
    }
    for (const auto& [edge, lo] : horizontal_lo) {
        const auto it = P.t_h.find(edge);
        if (it == P.t_h.end() || !inside(it->second, lo, horizontal_width())) return false;
    }
    for (cplx s : P.s)
        if (!(std::abs(s) < eps)) return false;
    return true;
}

LogBranch MultiSector::vertical_branch(int level) const {
    return LogBranch(vertical_lo.at(level), vertical_width(level));
}

LogBranch MultiSector::horizontal_branch(int edge) const {
    return LogBranch(horizontal_lo.at(edge), horizontal_width());
}

MultiSector make_sector(const EnhancedLevelGraph& G, double eps, const std::map<int, double>& vertical_lo,
                        const std::map<int, double>& horizontal_lo) {
    if (!(eps > 0.0)) throw ConfigError("sector radius must be positive");
    MultiSector S;
    S.eps = eps;
    S.a = compute_a(G);
    S.vertical_lo = vertical_lo;
    S.horizontal_lo = horizontal_lo;
    return S;
}

cplx plumbing_T(const EnhancedLevelGraph& G, const std::map<int, int>& a, const PlumbingParams& P, int edge) {
    if (edge < 0 || edge >= static_cast<int>(G.edges.size())) throw ConfigError("edge index out of range");
    const GraphEdge& E = G.edges[edge];
    if (E.kind != EdgeKind::Vertical) throw ConfigError("plumbing T is defined for vertical edges only");
    const int upper = G.vertices[E.a].level, lower = G.vertices[E.b].level;
    cplx T = 1.0;
    for (int k = lower; k <= upper - 1; ++k) {
        const auto ak = a.find(k);
        const auto tk = P.t.find(k);
        if (ak == a.end()) throw ConfigError("no a for level " + std::to_string(k));
        if (tk == P.t.end()) throw ConfigError("no scaling parameter for level " + std::to_string(k));
        if (ak->second % E.enhancement != 0)
            throw ConfigError("exponent a/b = " + std::to_string(ak->second) + "/" + std::to_string(E.enhancement) +
                              " is not an integer at level " + std::to_string(k));
        T *= std::pow(tk->second, ak->second / E.enhancement);
    }
    return T;
}

bool glue_ok(cplx u, cplx v, cplx T, double tol) { return std::abs(u * v - T) <= tol * std::max(1.0, std::abs(T)); }

cplx rescale_factor(int level, const std::map<int, int>& a, const PlumbingParams& P) {
    cplx r = 1.0;
    for (int k = -1; k >= level; --k) {
        const auto tk = P.t.find(k);
        if (tk == P.t.end()) throw ConfigError("no scaling parameter for level " + std::to_string(k));
        r *= std::pow(tk->second, a.at(k));
    }
    return r;
}

cplx annulus_period(int b, cplx r, cplx T, cplx p, const LogBranch& branch) {
    if (b < 1) throw ConfigError("enhancement must be at least 1");
    if (!(std::abs(T) > 0.0 && std::abs(T) < std::abs(p))) throw ConfigError("annulus needs 0 < |T| < |p|");
    const cplx Tb = std::pow(T, b);
    return (std::pow(p, b) - Tb) / static_cast<double>(b) + Tb * r * (std::log(p) - branch.log(T));
}

cplx cylinder_cross_period(cplx r, cplx t, const LogBranch& branch) {
    if (!(std::abs(t) > 0.0 && std::abs(t) < 1.0)) throw ConfigError("cylinder parameter needs 0 < |t| < 1");
    return 0.5 * r * branch.log(t);
}

namespace {

template <class F>
cplx integrate(F&& f, double a, double b) {
    using boost::math::quadrature::gauss_kronrod;
    const double re = gauss_kronrod<double, 31>::integrate([&](double x) { return f(x).real(); }, a, b, 15, 1e-14);
    const double im = gauss_kronrod<double, 31>::integrate([&](double x) { return f(x).imag(); }, a, b, 15, 1e-14);
    return {re, im};
}

} // namespace

cplx annulus_period_quadrature(int b, cplx r, cplx T, cplx p, const LogBranch& branch) {
    const double theta0 = branch.lift_arg(T);
    const double theta1 = std::arg(p);
    const cplx Tb = std::pow(T, b);
    auto F = [&](cplx u) { return std::pow(u, b - 1) + Tb * r / u; };
    // u = exp(x + i theta0): du = u dx
    const cplx radial = integrate(
        [&](double x) {
            const cplx u = std::exp(cplx(x, theta0));
            return F(u) * u;
        },
        std::log(std::abs(T)), std::log(std::abs(p)));
    // u = |p| exp(i phi): du = i u dphi
    const double rp = std::abs(p);
    const cplx arc = integrate(
        [&](double phi) {
            const cplx u = std::polar(rp, phi);
            return F(u) * u * cplx(0.0, 1.0);
        },
        theta0, theta1);
    return radial + arc;
}

cplx cylinder_cross_period_quadrature(cplx r, cplx t, const LogBranch& branch) {
    const double half_arg = 0.5 * branch.lift_arg(t);
    const double log_radius = 0.5 * std::log(std::abs(t));
    auto F = [&](cplx u) { return r / u; };
    const cplx radial = integrate(
        [&](double x) {
            const cplx u = std::exp(cplx(x, 0.0));
            return F(u) * u;
        },
        0.0, log_radius);
    const double rr = std::exp(log_radius);
    const cplx arc = integrate(
        [&](double phi) {
            const cplx u = std::polar(rr, phi);
            return F(u) * u * cplx(0.0, 1.0);
        },
        0.0, half_arg);
    return radial + arc;
}

double matching_defect(int b, cplx r, cplx T, cplx scale, cplx v) {
    const cplx u = T / v;
    const cplx du_dv = -T / (v * v);
    const cplx Tb = std::pow(T, b);
    const cplx upper = scale * (std::pow(u, b - 1) + Tb * r / u) * du_dv;
    const cplx lower = -scale * Tb * (std::pow(v, -b - 1) + r / v);
    return std::abs(upper - lower) / std::max(std::abs(lower), 1e-300);
}

} // namespace flatreg
