#include <algorithm>
#include <cmath>
#include <numeric>

#include "flatreg/errors.hpp"
#include "flatreg/ordering.hpp"

namespace flatreg {

namespace {

constexpr int kMaxElements = 10;

void check_size(const SubsurfaceSet& S) {
    if (S.elements.size() > kMaxElements)
        throw ConfigError("ordering enumeration is limited to " + std::to_string(kMaxElements) + " subsurfaces");
}

void extend(const SubsurfaceSet& S, std::vector<int>& levels_left, std::vector<bool>& used, Ordering& cur,
            std::vector<Ordering>& out) {
    const int n = static_cast<int>(S.elements.size());
    if (static_cast<int>(cur.size()) == n) {
        out.push_back(cur);
        return;
    }
    // next level element: the highest level not yet placed
    if (!levels_left.empty()) {
        const int next = levels_left.back();
        levels_left.pop_back();
        used[next] = true;
        cur.push_back(next);
        extend(S, levels_left, used, cur, out);
        cur.pop_back();
        used[next] = false;
        levels_left.push_back(next);
    }
    // or a cylinder whose circumference level is still below
    for (int i = 0; i < n; ++i) {
        if (used[i] || S.elements[i].kind != ElementKind::Cylinder) continue;
        const int host = S.find_level(S.elements[i].level);
        if (host >= 0 && used[host]) continue;
        used[i] = true;
        cur.push_back(i);
        extend(S, levels_left, used, cur, out);
        cur.pop_back();
        used[i] = false;
    }
}

} // namespace

int SubsurfaceSet::find_level(int level) const {
    for (int i = 0; i < static_cast<int>(elements.size()); ++i)
        if (elements[i].kind == ElementKind::Level && elements[i].level == level) return i;
    return -1;
}

SubsurfaceSet subsurfaces_of(const EnhancedLevelGraph& G) {
    SubsurfaceSet S;
    for (int i = 0; i >= -G.depth(); --i)
        S.elements.push_back({ElementKind::Level, i, -1, "X" + std::to_string(i)});
    for (int e : G.horizontal_edges()) {
        const int level = G.vertices[G.edges[e].a].level;
        S.elements.push_back({ElementKind::Cylinder, level, e, "C" + std::to_string(e)});
    }
    return S;
}

std::vector<int> ranks(const Ordering& o) {
    std::vector<int> r(o.size());
    for (size_t i = 0; i < o.size(); ++i) r[o[i]] = static_cast<int>(o.size() - 1 - i);
    return r;
}

bool is_admissible(const SubsurfaceSet& S, const Ordering& o) {
    const int n = static_cast<int>(S.elements.size());
    if (static_cast<int>(o.size()) != n) return false;
    std::vector<bool> seen(n, false);
    for (int i : o) {
        if (i < 0 || i >= n || seen[i]) return false;
        seen[i] = true;
    }
    const auto r = ranks(o);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto &A = S.elements[i], &B = S.elements[j];
            if (A.kind == ElementKind::Level && B.kind == ElementKind::Level && A.level > B.level && r[i] < r[j])
                return false;
        }
    for (int i = 0; i < n; ++i) {
        if (S.elements[i].kind != ElementKind::Cylinder) continue;
        const int host = S.find_level(S.elements[i].level);
        if (host >= 0 && r[i] < r[host]) return false;
    }
    return true;
}

std::vector<Ordering> enumerate_orderings(const SubsurfaceSet& S) {
    check_size(S);
    std::vector<int> levels;
    for (int i = 0; i < static_cast<int>(S.elements.size()); ++i)
        if (S.elements[i].kind == ElementKind::Level) levels.push_back(i);
    // popped from the back, so the highest level goes first
    std::sort(levels.begin(), levels.end(), [&](int a, int b) { return S.elements[a].level < S.elements[b].level; });
    std::vector<bool> used(S.elements.size(), false);
    Ordering cur;
    std::vector<Ordering> out;
    extend(S, levels, used, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Ordering> enumerate_orderings_brute_force(const SubsurfaceSet& S) {
    check_size(S);
    Ordering p(S.elements.size());
    std::iota(p.begin(), p.end(), 0);
    std::vector<Ordering> out;
    do {
        if (is_admissible(S, p)) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<double> element_sizes(const SubsurfaceSet& S, const std::map<int, int>& a, const PlumbingParams& P) {
    std::vector<double> sizes;
    for (const auto& e : S.elements) {
        double s = std::abs(rescale_factor(e.level, a, P));
        if (e.kind == ElementKind::Cylinder) {
            const auto it = P.t_h.find(e.edge);
            if (it == P.t_h.end()) throw ConfigError("no parameter for horizontal edge " + std::to_string(e.edge));
            s *= std::abs(std::log(std::abs(it->second)));
        }
        sizes.push_back(s);
    }
    return sizes;
}

bool is_consistent(const Ordering& o, const std::vector<double>& sizes, double rel_tol) {
    for (size_t i = 0; i < o.size(); ++i)
        for (size_t j = i + 1; j < o.size(); ++j)
            if (sizes[o[i]] < sizes[o[j]] * (1.0 - rel_tol)) return false;
    return true;
}

std::vector<Ordering> consistent_orderings(const SubsurfaceSet& S, const std::vector<double>& sizes) {
    if (sizes.size() != S.elements.size()) throw ConfigError("one size per subsurface is required");
    std::vector<Ordering> out;
    for (auto& o : enumerate_orderings(S))
        if (is_consistent(o, sizes)) out.push_back(std::move(o));
    return out;
}

bool is_wide(const SubsurfaceSet& S, const Ordering& o, int element) {
    if (S.elements[element].kind != ElementKind::Cylinder) return false;
    const auto r = ranks(o);
    for (int i = 0; i < static_cast<int>(S.elements.size()); ++i)
        if (S.elements[i].kind == ElementKind::Level && r[element] < r[i]) return false;
    return true;
}

int level_of(const CurveClass& c, const Ordering& o) {
    if (c.representatives.empty()) throw ConfigError("curve '" + c.name + "' has no representative");
    const auto r = ranks(o);
    int best = -1;
    for (const auto& rep : c.representatives) {
        if (rep.empty()) throw ConfigError("curve '" + c.name + "' has an empty representative");
        int top = rep.front();
        for (int e : rep) {
            if (e < 0 || e >= static_cast<int>(r.size())) throw ConfigError("representative names a missing subsurface");
            if (r[e] > r[top]) top = e;
        }
        if (best < 0 || r[top] < r[best]) best = top;
    }
    return best;
}

} // namespace flatreg
