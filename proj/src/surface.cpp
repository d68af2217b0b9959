#include "flatreg/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "flatreg/errors.hpp"

namespace flatreg {

int StratumSignature::genus() const {
    int total = 0;
    for (int m : zero_orders) total += m;
    return (total + 2) / 2;
}

namespace {

int next_corner_ccw(const TranslationSurface& X, int corner) {
    const int t = corner / 3, k = corner % 3;
    return X.glue[3 * t + (k + 2) % 3];
}

double corner_angle(const TranslationSurface& X, int corner) {
    const auto& e = X.triangles[corner / 3].e;
    const int k = corner % 3;
    const cplx right = e[k], left = -e[(k + 2) % 3];
    return std::atan2(cross(right, left), dot(right, left));
}

} // namespace

VertexData vertex_data(const TranslationSurface& X) {
    const int n = 3 * X.num_triangles();
    VertexData out;
    out.corner_vertex.assign(n, -1);
    const bool glued = static_cast<int>(X.glue.size()) == n;
    for (int c0 = 0; c0 < n; ++c0) {
        if (out.corner_vertex[c0] >= 0) continue;
        const int id = out.count();
        out.angle.push_back(0.0);
        int c = c0;
        while (c >= 0 && c < n && out.corner_vertex[c] < 0) {
            out.corner_vertex[c] = id;
            out.angle[id] += corner_angle(X, c);
            c = glued ? next_corner_ccw(X, c) : -1;
        }
    }
    return out;
}

double area(const TranslationSurface& X) {
    double a = 0.0;
    for (const auto& tr : X.triangles) a += 0.5 * cross(tr.e[0], tr.e[1]);
    return a;
}

TranslationSurface scaled(const TranslationSurface& X, double s) {
    TranslationSurface Y = X;
    for (auto& tr : Y.triangles)
        for (auto& e : tr.e) e *= s;
    return Y;
}

TranslationSurface transformed(const TranslationSurface& X, const Eigen::Matrix2d& g) {
    TranslationSurface Y = X;
    for (auto& tr : Y.triangles)
        for (auto& e : tr.e) {
            const Eigen::Vector2d v = g * Eigen::Vector2d(e.real(), e.imag());
            e = cplx(v[0], v[1]);
        }
    return Y;
}

ValidationReport validate_surface(const TranslationSurface& X, const StratumSignature& sig,
                                  double tol) {
    ValidationReport rep;
    const int T = X.num_triangles();
    const int n = 3 * T;
    auto say = [](std::vector<std::string>& v, const std::string& s) { v.push_back(s); };

    if (T == 0) say(rep.structural, "surface has no triangles");
    if (static_cast<int>(X.glue.size()) != n) {
        say(rep.structural, "gluing table has " + std::to_string(X.glue.size()) + " entries, expected " +
                                std::to_string(n));
    } else {
        for (int s = 0; s < n; ++s) {
            const int p = X.glue[s];
            const std::string where = "edge (" + std::to_string(s / 3) + "," + std::to_string(s % 3) + ")";
            if (p < 0) {
                say(rep.structural, "dangling gluing at " + where);
            } else if (p >= n) {
                say(rep.structural, "gluing partner out of range at " + where);
            } else if (p == s) {
                say(rep.structural, "edge glued to itself at " + where);
            } else if (X.glue[p] != s) {
                say(rep.structural, "gluing is not an involution at " + where);
            }
        }
    }
    if (X.has_classes() && X.edge_class.rows() != n)
        say(rep.structural, "edge class table has wrong number of rows");

    for (int t = 0; t < T; ++t) {
        const auto& e = X.triangles[t].e;
        const double scale = std::abs(e[0]) + std::abs(e[1]) + std::abs(e[2]);
        if (std::abs(e[0] + e[1] + e[2]) > tol * std::max(scale, 1.0))
            say(rep.metric, "closure violated in triangle " + std::to_string(t));
        if (!(cross(e[0], e[1]) > 0.0))
            say(rep.metric, "triangle " + std::to_string(t) + " is degenerate or clockwise");
    }
    rep.area = area(X);
    if (!(rep.area > 0.0)) say(rep.metric, "total area is not positive");

    if (!rep.structural.empty()) return rep;

    for (int s = 0; s < n; ++s) {
        const int p = X.glue[s];
        if (p < s) continue;
        const cplx a = X.edge(s), b = X.edge(p);
        if (std::abs(a + b) > tol * std::max(std::abs(a), 1.0))
            say(rep.metric, "glued edges (" + std::to_string(s / 3) + "," + std::to_string(s % 3) + ") and (" +
                                std::to_string(p / 3) + "," + std::to_string(p % 3) +
                                ") do not carry opposite holonomy");
    }

    const VertexData vd = vertex_data(X);
    for (const auto& [v, m] : X.zeros) {
        if (v < 0 || v >= vd.count()) say(rep.metric, "zero assigned to missing vertex " + std::to_string(v));
        if (m < 0) say(rep.metric, "negative zero order at vertex " + std::to_string(v));
    }
    std::vector<int> orders;
    for (int v = 0; v < vd.count(); ++v) {
        const auto it = X.zeros.find(v);
        const int m = it == X.zeros.end() ? 0 : it->second;
        orders.push_back(m);
        const double turns = vd.angle[v] / (2.0 * std::numbers::pi);
        if (std::abs(turns - (m + 1)) > 1e-6) {
            std::ostringstream os;
            os << "cone angle at vertex " << v << " is " << turns << "*2pi, expected " << (m + 1) << "*2pi";
            say(rep.metric, os.str());
        }
    }
    std::vector<int> want = sig.zero_orders;
    std::sort(orders.begin(), orders.end());
    std::sort(want.begin(), want.end());
    if (orders != want) say(rep.metric, "vertex orders do not match the stratum signature");

    const int euler = vd.count() - n / 2 + T;
    rep.genus = (2 - euler) / 2;
    if (euler != 2 - 2 * sig.genus())
        say(rep.metric, "Euler characteristic " + std::to_string(euler) + " does not match genus " +
                            std::to_string(sig.genus()));
    return rep;
}

bool are_parallel(cplx h1, cplx h2, double tau) {
    const double scale = std::abs(h1) * std::abs(h2);
    return std::abs((h1 * std::conj(h2)).imag()) <= tau * scale;
}

bool are_parallel(const SaddleConnection& s1, const SaddleConnection& s2, double tau) {
    return are_parallel(s1.holonomy, s2.holonomy, tau);
}

LinearSubspace LinearSubspace::full(int m) {
    LinearSubspace W;
    W.ambient_dim = m;
    W.basis = Eigen::MatrixXcd::Identity(m, m);
    W.real = true;
    return W;
}

int complex_rank(const Eigen::MatrixXcd& M, double tau) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] <= 0.0) return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > tau * sv[0]) ++r;
    return r;
}

int independence_rank(const std::vector<Eigen::VectorXi>& classes, const LinearSubspace& W, double tau) {
    if (classes.empty()) return 0;
    Eigen::MatrixXcd M(static_cast<Eigen::Index>(classes.size()), W.dim());
    for (size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].size() != W.ambient_dim)
            throw ConfigError("class has dimension " + std::to_string(classes[i].size()) +
                              " but the subspace lives in dimension " + std::to_string(W.ambient_dim));
        M.row(static_cast<Eigen::Index>(i)) = (W.basis * classes[i].cast<cplx>()).transpose();
    }
    return complex_rank(M, tau);
}

Eigen::VectorXcd period_vector(const TranslationSurface& X) {
    if (!X.has_classes()) throw RuntimeError("surface carries no homology classes");
    const int n = static_cast<int>(X.edge_class.rows());
    Eigen::MatrixXcd A = X.edge_class.cast<cplx>();
    Eigen::VectorXcd h(n);
    for (int s = 0; s < n; ++s) h[s] = X.edge(s);
    return A.colPivHouseholderQr().solve(h);
}

} // namespace flatreg
