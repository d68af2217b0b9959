#include <algorithm>
#include <cmath>
#include <map>

#include "flatreg/errors.hpp"
#include "flatreg/surface.hpp"

namespace flatreg {

std::vector<cplx> polygon_vertices(const std::vector<cplx>& sides) {
    std::vector<cplx> v;
    v.reserve(sides.size());
    cplx p = 0.0;
    for (const cplx& s : sides) {
        v.push_back(p);
        p += s;
    }
    return v;
}

double signed_polygon_area(const std::vector<cplx>& v) {
    double a = 0.0;
    const size_t n = v.size();
    for (size_t i = 0; i < n; ++i) a += cross(v[i], v[(i + 1) % n]);
    return 0.5 * a;
}

namespace {

int orient(cplx a, cplx b, cplx c, double eps) {
    const double o = cross(b - a, c - a);
    const double s = std::abs(b - a) * std::abs(c - a);
    if (o > eps * s) return 1;
    if (o < -eps * s) return -1;
    return 0;
}

bool on_segment(cplx a, cplx b, cplx p) {
    return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

bool segments_meet(cplx a, cplx b, cplx c, cplx d) {
    constexpr double eps = 1e-12;
    const int o1 = orient(a, b, c, eps), o2 = orient(a, b, d, eps);
    const int o3 = orient(c, d, a, eps), o4 = orient(c, d, b, eps);
    if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) {
        if (o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
    }
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

} // namespace

bool is_simple_polygon(const std::vector<cplx>& v) {
    const size_t n = v.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        if (std::abs(v[(i + 1) % n] - v[i]) == 0.0) return false;
        for (size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_meet(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
        }
    }
    // adjacent sides folding back onto each other
    for (size_t i = 0; i < n; ++i) {
        const cplx a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
        if (orient(a, b, c, 1e-12) == 0 && dot(b - a, c - b) < 0.0) return false;
    }
    return true;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<cplx>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<std::array<int, 3>> tris;
    constexpr double eps = 1e-12;

    while (idx.size() > 3) {
        const int m = static_cast<int>(idx.size());
        bool clipped = false;
        for (int i = 0; i < m && !clipped; ++i) {
            const int ia = idx[(i + m - 1) % m], ib = idx[i], ic = idx[(i + 1) % m];
            const cplx a = v[ia], b = v[ib], c = v[ic];
            if (orient(a, b, c, eps) <= 0) continue;
            bool blocked = false;
            for (int j = 0; j < m && !blocked; ++j) {
                const int q = idx[j];
                if (q == ia || q == ib || q == ic) continue;
                const cplx p = v[q];
                if (orient(a, b, p, eps) >= 0 && orient(b, c, p, eps) >= 0 && orient(c, a, p, eps) >= 0)
                    blocked = true;
            }
            if (blocked) continue;
            tris.push_back({ia, ib, ic});
            idx.erase(idx.begin() + i);
            clipped = true;
        }
        if (!clipped) throw RuntimeError("ear clipping failed: polygon is not simple");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

TranslationSurface from_polygons(const PolygonGluing& P) {
    TranslationSurface X;
    const bool with_classes = !P.side_class.empty();
    int rank = 0;
    if (with_classes) {
        for (const auto& pc : P.side_class)
            for (const auto& c : pc) rank = std::max(rank, static_cast<int>(c.size()));
    }

    std::map<std::pair<int, int>, int> side_slot;  // (polygon, side) -> slot
    std::vector<Eigen::VectorXi> slot_class;

    for (int p = 0; p < static_cast<int>(P.sides.size()); ++p) {
        const auto& sides = P.sides[p];
        const int n = static_cast<int>(sides.size());
        const std::vector<cplx> verts = polygon_vertices(sides);
        if (!(signed_polygon_area(verts) > 0.0) || !is_simple_polygon(verts))
            throw ConfigError("polygon " + std::to_string(p) + " is not a simple counterclockwise polygon");

        // displacement and class from vertex a to vertex b along the boundary
        auto walk = [&](int a, int b, cplx& d, Eigen::VectorXi& c) {
            d = 0.0;
            c = Eigen::VectorXi::Zero(rank);
            for (int i = a; i != b; i = (i + 1) % n) {
                d += sides[i];
                if (with_classes) c += P.side_class[p][i];
            }
        };

        std::map<std::pair<int, int>, int> diag_slot;
        for (const auto& tri : ear_clip(verts)) {
            const int t = X.num_triangles();
            Triangle T;
            for (int k = 0; k < 3; ++k) {
                const int u = tri[k], w = tri[(k + 1) % 3];
                cplx d;
                Eigen::VectorXi c;
                if (w == (u + 1) % n) {
                    d = sides[u];
                    c = with_classes ? P.side_class[p][u] : Eigen::VectorXi();
                    side_slot[{p, u}] = 3 * t + k;
                } else {
                    walk(u, w, d, c);
                    const auto key = std::make_pair(std::min(u, w), std::max(u, w));
                    auto it = diag_slot.find(key);
                    if (it == diag_slot.end()) {
                        diag_slot[key] = 3 * t + k;
                    } else {
                        X.glue.resize(3 * t + 3, -1);
                        X.glue[3 * t + k] = it->second;
                        X.glue[it->second] = 3 * t + k;
                    }
                }
                T.e[k] = d;
                slot_class.push_back(c);
            }
            X.triangles.push_back(T);
            X.glue.resize(3 * X.num_triangles(), -1);
        }
    }

    for (const auto& [s1, s2] : P.pairs) {
        const auto a = side_slot.find({s1.polygon, s1.side});
        const auto b = side_slot.find({s2.polygon, s2.side});
        if (a == side_slot.end() || b == side_slot.end()) throw ConfigError("side gluing references a missing side");
        X.glue[a->second] = b->second;
        X.glue[b->second] = a->second;
    }
    if (with_classes) {
        X.edge_class.resize(static_cast<Eigen::Index>(slot_class.size()), rank);
        for (size_t s = 0; s < slot_class.size(); ++s) X.edge_class.row(static_cast<Eigen::Index>(s)) = slot_class[s];
    }
    X.zeros = P.zeros;
    return X;
}

namespace {

// Flip the edge at slot s. Corner orders and classes travel with the triangles.
void flip(TranslationSurface& X, std::vector<int>& corner_order, int s) {
    const int t = s / 3, j = s % 3;
    const int sp = X.glue[s];
    const int u = sp / 3, k = sp % 3;
    const auto et = X.triangles[t].e;
    const auto eu = X.triangles[u].e;
    const int j1 = (j + 1) % 3, j2 = (j + 2) % 3, k1 = (k + 1) % 3, k2 = (k + 2) % 3;
    const bool cls = X.has_classes();

    // old slot of each new slot: T1 = (C, A, D) in t, T2 = (D, B, C) in u
    const int from[6] = {3 * t + j2, 3 * u + k1, -1, 3 * u + k2, 3 * t + j1, -1};
    const int new_slot[6] = {3 * t + 0, 3 * t + 1, 3 * t + 2, 3 * u + 0, 3 * u + 1, 3 * u + 2};

    const cplx diag = et[j2] + eu[k1];  // from C to D
    Triangle T1, T2;
    T1.e = {et[j2], eu[k1], -diag};
    T2.e = {eu[k2], et[j1], diag};

    Eigen::MatrixXi cl_old;
    if (cls) {
        cl_old.resize(6, X.edge_class.cols());
        for (int i = 0; i < 6; ++i)
            if (from[i] >= 0) cl_old.row(i) = X.edge_class.row(from[i]);
        const Eigen::VectorXi d = (cl_old.row(0) + cl_old.row(1)).transpose();
        cl_old.row(2) = -d.transpose();
        cl_old.row(5) = d.transpose();
    }

    const int oC = corner_order[3 * t + j2], oA = corner_order[3 * t + j], oB = corner_order[3 * t + j1];
    const int oD = corner_order[3 * u + k2];

    int partner_old[6];
    for (int i = 0; i < 6; ++i) partner_old[i] = from[i] >= 0 ? X.glue[from[i]] : -1;

    auto remap = [&](int old) {
        for (int i = 0; i < 6; ++i)
            if (from[i] == old) return new_slot[i];
        return -1;
    };

    X.triangles[t] = T1;
    X.triangles[u] = T2;
    corner_order[3 * t + 0] = oC;
    corner_order[3 * t + 1] = oA;
    corner_order[3 * t + 2] = oD;
    corner_order[3 * u + 0] = oD;
    corner_order[3 * u + 1] = oB;
    corner_order[3 * u + 2] = oC;

    for (int i = 0; i < 6; ++i) {
        if (from[i] < 0) continue;
        const int inner = remap(partner_old[i]);
        const int p = inner >= 0 ? inner : partner_old[i];
        X.glue[new_slot[i]] = p;
        if (inner < 0) X.glue[p] = new_slot[i];
    }
    X.glue[3 * t + 2] = 3 * u + 2;
    X.glue[3 * u + 2] = 3 * t + 2;
    if (cls)
        for (int i = 0; i < 6; ++i) X.edge_class.row(new_slot[i]) = cl_old.row(i);
}

bool needs_flip(const TranslationSurface& X, int s) {
    const int sp = X.glue[s];
    if (sp < 0 || sp / 3 == s / 3) return false;
    const auto& et = X.triangles[s / 3].e;
    const auto& eu = X.triangles[sp / 3].e;
    const int j = s % 3, k = sp % 3;
    const cplx ca = et[(j + 2) % 3], cb = -et[(j + 1) % 3];
    const cplx db = eu[(k + 2) % 3], da = -eu[(k + 1) % 3];
    const double cotC = dot(ca, cb) / std::abs(cross(ca, cb));
    const double cotD = dot(db, da) / std::abs(cross(db, da));
    return cotC + cotD < -1e-9;
}

} // namespace

void make_delaunay(TranslationSurface& X, int max_flips) {
    const int n = 3 * X.num_triangles();
    const VertexData vd = vertex_data(X);
    std::vector<int> corner_order(n);
    for (int c = 0; c < n; ++c) {
        const auto it = X.zeros.find(vd.corner_vertex[c]);
        corner_order[c] = it == X.zeros.end() ? 0 : it->second;
    }
    int flips = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (X.glue[s] < s) continue;
            if (needs_flip(X, s)) {
                flip(X, corner_order, s);
                changed = true;
                if (++flips > max_flips) throw RuntimeError("Delaunay flipping did not terminate");
            }
        }
    }
    if (flips == 0) return;
    const VertexData after = vertex_data(X);
    X.zeros.clear();
    for (int c = 0; c < n; ++c)
        if (corner_order[c] != 0) X.zeros[after.corner_vertex[c]] = corner_order[c];
}

} // namespace flatreg
