#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "flatreg/errors.hpp"
#include "flatreg/ordering.hpp"

namespace flatreg {

CylinderRectangle cylinder_rectangle(cplx w, double c_prime) {
    if (!(std::abs(w) > 0.0)) throw ConfigError("rectangle needs a nonzero circumference");
    if (c_prime < 0.0) throw ConfigError("C' must be nonnegative");
    const double n = std::abs(w);
    return {w, (1.0 + c_prime) * n, 1.0 / n + c_prime * n};
}

bool CylinderRectangle::contains(cplx z, double tol) const {
    const cplx u = w / std::abs(w);
    const cplx local = z * std::conj(u);
    const double slack = tol * std::max({1.0, half_along, half_across});
    return std::abs(local.real()) <= half_along + slack && std::abs(local.imag()) <= half_across + slack;
}

std::array<cplx, 4> CylinderRectangle::corners() const {
    const cplx u = w / std::abs(w);
    return {u * cplx(half_along, half_across), u * cplx(-half_along, half_across), u * cplx(-half_along, -half_across),
            u * cplx(half_along, -half_across)};
}

double volume_bound_product(const std::vector<double>& eps, double c, double K, double R, int j, int l) {
    const int k = static_cast<int>(eps.size());
    if (!(c > 0.0 && K > 0.0 && R > 0.0)) throw ConfigError("bound constants must be positive");
    if (!(k <= l && l <= j)) throw ConfigError("bound needs k <= l <= j");
    double v = 1.0;
    for (double e : eps) v *= std::numbers::pi * e * e / (c * c);
    v *= std::pow(std::numbers::pi * K * K, l - k);
    v *= std::pow(R, j - l);
    return v;
}

namespace {

PlumbingParams family_params(const FamilySpec& spec, double t) {
    PlumbingParams P;
    P.p = spec.p;
    switch (spec.kind) {
    case FamilyKind::TwoLevel: P.t[-1] = t; break;
    case FamilyKind::ThreeLevel:
        P.t[-1] = t;
        P.t[-2] = t;
        break;
    case FamilyKind::Horizontal: P.t_h[0] = t; break;
    case FamilyKind::Residue: throw ConfigError("the residue family has no flat surface");
    }
    return P;
}

double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (!(*lo > 0.0)) return std::numeric_limits<double>::infinity();
    return *hi / *lo;
}

} // namespace

BoundLemmaReport check_bound_lemmas(const FamilySpec& spec, const std::vector<double>& t_grid,
                                    const std::optional<Ordering>& ordering) {
    if (t_grid.size() < 2) throw ConfigError("bound check needs at least two values of t");
    const BasisFixture Fx = family_fixture(spec);
    const auto a = compute_a(family_graph(spec));
    BoundLemmaReport rep;
    for (const auto& c : Fx.curves) rep.cycle_names.push_back(c.name);

    for (double t : t_grid) {
        const PlumbingParams P = family_params(spec, t);
        const FamilyPoint F = assemble_synthetic_family(spec, P);
        const double s = 1.0 / std::sqrt(area(F.surface));
        const TranslationSurface X = scaled(F.surface, s);
        const auto sizes = element_sizes(Fx.S, a, P);
        Ordering o;
        if (ordering) {
            if (!is_admissible(Fx.S, *ordering) || !is_consistent(*ordering, sizes))
                throw ConfigError("ordering is inconsistent with the sizes at t = " + std::to_string(t));
            o = *ordering;
        } else {
            const auto orders = consistent_orderings(Fx.S, sizes);
            if (orders.empty()) throw RuntimeError("no ordering is consistent with the sizes at t = " + std::to_string(t));
            o = orders.front();
        }
        const auto r = ranks(o);

        BoundLemmaRow row;
        row.t = t;
        std::vector<int> curve_level;
        for (size_t i = 0; i < Fx.curves.size(); ++i) {
            curve_level.push_back(level_of(Fx.curves[i], o));
            row.upper_ratio.push_back(std::abs(F.surface_periods[i]) * s / sizes[curve_level.back()]);
        }

        double L = 0.0;
        for (size_t i = 0; i < Fx.curves.size(); ++i) L = std::max(L, std::abs(F.surface_periods[i]) * s);
        EnumerateOptions opt;
        opt.chains = false;
        const auto conns = enumerate_saddle_connections(X, 1.05 * L, opt);
        // shortest connection whose level is at or above each element
        std::vector<double> shortest(Fx.S.elements.size(), std::numeric_limits<double>::infinity());
        for (const auto& c : conns) {
            int top = -1;
            for (Eigen::Index j = 0; j < c.cls.size(); ++j)
                if (c.cls[j] != 0 && (top < 0 || r[curve_level[j]] > r[top])) top = curve_level[j];
            if (top < 0) continue;
            for (size_t z = 0; z < shortest.size(); ++z)
                if (r[top] >= r[z]) shortest[z] = std::min(shortest[z], std::abs(c.holonomy));
        }
        for (size_t i = 0; i < Fx.curves.size(); ++i)
            row.lower_ratio.push_back(shortest[curve_level[i]] / (std::abs(F.surface_periods[i]) * s));
        if (rep.cycle_levels.empty())
            for (int z : curve_level) rep.cycle_levels.push_back(Fx.S.elements[z].name);
        rep.rows.push_back(row);
    }

    for (size_t i = 0; i < rep.cycle_names.size(); ++i) {
        std::vector<double> v;
        for (const auto& row : rep.rows) v.push_back(row.upper_ratio[i]);
        rep.upper_spread = std::max(rep.upper_spread, spread(v));
    }
    for (size_t i = 0; i < rep.cycle_names.size(); ++i) {
        std::vector<double> v;
        for (const auto& row : rep.rows) v.push_back(row.lower_ratio[i]);
        rep.lower_spread = std::max(rep.lower_spread, spread(v));
    }
    return rep;
}

} // namespace flatreg
