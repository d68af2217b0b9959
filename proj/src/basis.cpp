#include <algorithm>
#include <numeric>

#include <Eigen/LU>

#include "flatreg/errors.hpp"
#include "flatreg/ordering.hpp"

namespace flatreg {

int class_rank(const std::vector<Eigen::VectorXi>& classes) {
    if (classes.empty()) return 0;
    Eigen::MatrixXd M(classes.size(), classes.front().size());
    for (size_t i = 0; i < classes.size(); ++i) M.row(i) = classes[i].cast<double>().transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-9);
    return static_cast<int>(lu.rank());
}

namespace {

int wide_crossings(const BasisFixture& F, const Ordering& o, const CurveClass& c) {
    int n = 0;
    for (const auto& [cyl, count] : c.crossings)
        if (is_wide(F.S, o, cyl)) n += count;
    return n;
}

std::vector<Eigen::VectorXi> classes_below(const BasisFixture& F, const Ordering& o, int Z) {
    const auto r = ranks(o);
    std::vector<Eigen::VectorXi> out;
    for (const auto& c : F.curves)
        if (r[level_of(c, o)] <= r[Z]) out.push_back(c.cls);
    return out;
}

} // namespace

AlphaBasis build_alpha_basis(const BasisFixture& F, const Ordering& o) {
    if (!is_admissible(F.S, o)) throw ConfigError("ordering is not admissible for fixture '" + F.name + "'");
    AlphaBasis B;
    std::vector<Eigen::VectorXi> span;
    // least element first; wide cylinders sit above every level and so come last
    for (auto it = o.rbegin(); it != o.rend(); ++it) {
        const int Z = *it;
        std::vector<int> cand;
        for (int i = 0; i < static_cast<int>(F.curves.size()); ++i)
            if (level_of(F.curves[i], o) == Z) cand.push_back(i);
        std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
            return wide_crossings(F, o, F.curves[a]) < wide_crossings(F, o, F.curves[b]);
        });
        for (int i : cand) {
            span.push_back(F.curves[i].cls);
            if (class_rank(span) == static_cast<int>(span.size())) B.curves.push_back(i);
            else span.pop_back();
        }
    }
    if (static_cast<int>(B.curves.size()) != F.rank)
        throw RuntimeError("fixture '" + F.name + "': curves span rank " + std::to_string(B.curves.size()) + " of " +
                           std::to_string(F.rank));
    return B;
}

BasisCheck check_alpha_basis(const BasisFixture& F, const Ordering& o, const AlphaBasis& B) {
    BasisCheck chk;
    std::vector<Eigen::VectorXi> alpha;
    for (int i : B.curves) alpha.push_back(F.curves[i].cls);

    for (int Z : o) {
        const auto below = classes_below(F, o, Z);
        const int d = class_rank(below);
        const std::vector<Eigen::VectorXi> prefix(alpha.begin(), alpha.begin() + std::min<size_t>(d, alpha.size()));
        auto both = below;
        both.insert(both.end(), prefix.begin(), prefix.end());
        if (static_cast<int>(prefix.size()) != d || class_rank(prefix) != d || class_rank(both) != d) {
            chk.prefix = false;
            chk.failures.push_back("span below " + F.S.elements[Z].name + " is not a prefix");
        }
    }
    for (int i : B.curves) {
        const CurveClass& c = F.curves[i];
        if (wide_crossings(F, o, c) > 1) {
            chk.single_crossing = false;
            chk.failures.push_back(c.name + " crosses wide circumferences more than once");
        }
        for (const auto& [cyl, count] : c.crossings) {
            if (count == 0 || !is_wide(F.S, o, cyl)) continue;
            const int lvl = F.S.elements[cyl].level;
            const bool found = std::any_of(c.representatives.begin(), c.representatives.end(), [&](const auto& rep) {
                return std::all_of(rep.begin(), rep.end(), [&](int e) {
                    const auto& E = F.S.elements[e];
                    return E.kind != ElementKind::Level || E.level <= lvl;
                });
            });
            if (!found) {
                chk.low_representative = false;
                chk.failures.push_back(c.name + " has no representative below the level of " + F.S.elements[cyl].name);
            }
        }
    }
    return chk;
}

std::vector<int> extract_beta_basis(const std::vector<Eigen::VectorXi>& classes, const LinearSubspace& W, double tau) {
    std::vector<int> chosen;
    std::vector<Eigen::VectorXi> picked;
    for (int i = 0; i < static_cast<int>(classes.size()); ++i) {
        picked.push_back(classes[i]);
        if (independence_rank(picked, W, tau) == static_cast<int>(picked.size())) chosen.push_back(i);
        else picked.pop_back();
        if (static_cast<int>(chosen.size()) == W.dim()) break;
    }
    return chosen;
}

// ---------------------------------------------------------------------------
// Fixtures

namespace {

Eigen::VectorXi vec(std::initializer_list<int> v) {
    Eigen::VectorXi x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (int c : v) x[i++] = c;
    return x;
}

SubsurfaceElement lvl(int level) { return {ElementKind::Level, level, -1, "X" + std::to_string(level)}; }
SubsurfaceElement cyl(int level, int edge) {
    return {ElementKind::Cylinder, level, edge, "C" + std::to_string(edge)};
}

} // namespace

std::vector<BasisFixture> basis_fixtures() {
    std::vector<BasisFixture> out;
    {
        BasisFixture F;
        F.name = "three_levels";
        F.S.elements = {lvl(0), lvl(-1), lvl(-2)};
        F.rank = 6;
        F.curves = {
            {"a0", vec({1, 0, 0, 0, 0, 0}), {{0}}, {}},
            {"b0", vec({0, 1, 0, 0, 0, 0}), {{0}}, {}},
            {"a1", vec({0, 0, 1, 0, 0, 0}), {{1}}, {}},
            {"b1", vec({0, 0, 0, 1, 0, 0}), {{1}}, {}},
            {"a2", vec({0, 0, 0, 0, 1, 0}), {{2}}, {}},
            {"b2", vec({0, 0, 0, 0, 0, 1}), {{2}}, {}},
            {"a0+a1", vec({1, 0, 1, 0, 0, 0}), {{0, 1}}, {}},
            {"a1-b2", vec({0, 0, 1, 0, 0, -1}), {{1, 2}}, {}},
        };
        out.push_back(F);
    }
    {
        BasisFixture F;
        F.name = "two_levels_relative";
        F.S.elements = {lvl(0), lvl(-1)};
        F.rank = 5;
        F.curves = {
            {"a0", vec({1, 0, 0, 0, 0}), {{0}}, {}},
            {"b0", vec({0, 1, 0, 0, 0}), {{0}}, {}},
            {"a1", vec({0, 0, 1, 0, 0}), {{1}}, {}},
            {"b1", vec({0, 0, 0, 1, 0}), {{1}, {0, 1}}, {}},
            {"zero_to_zero", vec({0, 0, 0, 0, 1}), {{0, 1}}, {}},
        };
        out.push_back(F);
    }
    {
        BasisFixture F;
        F.name = "level_cylinder";
        F.S.elements = {lvl(0), lvl(-1), cyl(-1, 0)};
        F.rank = 5;
        F.curves = {
            {"a0", vec({1, 0, 0, 0, 0}), {{0}}, {}},
            {"b0", vec({0, 1, 0, 0, 0}), {{0}}, {}},
            {"core", vec({0, 0, 1, 0, 0}), {{1}}, {}},
            {"cross_twice", vec({0, 0, 0, 2, 1}), {{0, 1, 2}}, {{2, 2}}},
            {"cross", vec({0, 0, 0, 1, 0}), {{1, 2}, {0, 2}}, {{2, 1}}},
            {"rel", vec({0, 0, 0, 0, 1}), {{0, 1}}, {}},
        };
        out.push_back(F);
    }
    {
        BasisFixture F;
        F.name = "two_cylinders";
        F.S.elements = {lvl(0), cyl(0, 0), cyl(0, 1)};
        F.rank = 6;
        F.curves = {
            {"a", vec({1, 0, 0, 0, 0, 0}), {{0}}, {}},
            {"b", vec({0, 1, 0, 0, 0, 0}), {{0}}, {}},
            {"core1", vec({0, 0, 1, 0, 0, 0}), {{0}}, {}},
            {"core2", vec({0, 0, 0, 1, 0, 0}), {{0}}, {}},
            {"cross12", vec({0, 0, 0, 0, 1, 1}), {{0, 1, 2}}, {{1, 1}, {2, 1}}},
            {"cross1", vec({0, 0, 0, 0, 1, 0}), {{0, 1}}, {{1, 1}}},
            {"cross2", vec({0, 0, 0, 0, 0, 1}), {{0, 2}}, {{2, 1}}},
        };
        out.push_back(F);
    }
    for (FamilyKind k : {FamilyKind::TwoLevel, FamilyKind::Horizontal, FamilyKind::ThreeLevel}) {
        FamilySpec spec;
        spec.kind = k;
        out.push_back(family_fixture(spec));
    }
    return out;
}

BasisFixture family_fixture(const FamilySpec& spec) {
    BasisFixture F;
    auto e = [](int n, int i) {
        Eigen::VectorXi v = Eigen::VectorXi::Zero(n);
        v[i] = 1;
        return v;
    };
    switch (spec.kind) {
    case FamilyKind::TwoLevel:
        F.name = "family_two_level";
        F.S.elements = {lvl(0), lvl(-1)};
        F.rank = 5;
        F.curves = {{"omega1", e(5, 0), {{0}}, {}}, {"omega2", e(5, 1), {{0}}, {}},
                    {"slit", e(5, 2), {{1}}, {}},   {"cross", e(5, 3), {{1}}, {}},
                    {"zero", e(5, 4), {{0, 1}}, {}}};
        break;
    case FamilyKind::ThreeLevel:
        F.name = "family_three_level";
        F.S.elements = {lvl(0), lvl(-1), lvl(-2)};
        F.rank = 8;
        F.curves = {{"omega1", e(8, 0), {{0}}, {}},     {"omega2", e(8, 1), {{0}}, {}},
                    {"slit1", e(8, 2), {{1}}, {}},      {"cross1", e(8, 3), {{1}}, {}},
                    {"slit2", e(8, 4), {{2}}, {}},      {"cross2", e(8, 5), {{2}}, {}},
                    {"zero1", e(8, 6), {{0, 1}}, {}},   {"zero2", e(8, 7), {{0, 1, 2}}, {}}};
        break;
    case FamilyKind::Horizontal:
        F.name = "family_horizontal";
        F.S.elements = {lvl(0), cyl(0, 0)};
        F.rank = 5;
        F.curves = {{"omega1", e(5, 0), {{0}}, {}},        {"omega2", e(5, 1), {{0}}, {}},
                    {"circumference", e(5, 2), {{0}}, {}}, {"cross", e(5, 3), {{0, 1}}, {{1, 1}}},
                    {"zero", e(5, 4), {{0}}, {}}};
        break;
    case FamilyKind::Residue: throw ConfigError("the residue family has no flat surface to attach a fixture to");
    }
    return F;
}

} // namespace flatreg
