#include <algorithm>
#include <cmath>
#include <deque>

#include "flatreg/errors.hpp"
#include "flatreg/surface.hpp"

namespace flatreg {

namespace {

struct Node {
    int tri;      // triangle entered
    int entry;    // edge of tri crossed on entry
    int parent;   // index of parent node, or -1 - start corner
    cplx a, b;    // right and left ends of the entry edge
    cplx r, l;    // open wedge of visible directions
};

// One representative per +/- pair: upper half plane, or the positive real axis.
bool canonical(cplx h, double tol) {
    const double m = std::abs(h);
    if (h.imag() > tol * m) return true;
    if (h.imag() < -tol * m) return false;
    return h.real() > 0.0;
}

double dist_to_segment(cplx p, cplx q) {
    const cplx d = q - p;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p);
    const double s = std::clamp(-dot(p, d) / len2, 0.0, 1.0);
    return std::abs(p + s * d);
}

// Distance from the origin to the part of segment [a,b] inside the wedge (r,l).
double visible_distance(cplx a, cplx b, cplx r, cplx l) {
    const cplx d = b - a;
    double s0 = 0.0, s1 = 1.0;
    const double dr = cross(r, d);
    if (dr > 0.0) s0 = std::max(s0, -cross(r, a) / dr);
    const double dl = cross(l, d);
    if (dl > 0.0) s1 = std::min(s1, -cross(l, a) / dl);
    if (s0 > s1) return dist_to_segment(a, b);
    return dist_to_segment(a + s0 * d, a + s1 * d);
}

} // namespace

std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& X0, double L,
                                                           const EnumerateOptions& opt) {
    if (!(L > 0.0)) throw ConfigError("length bound must be positive");
    TranslationSurface Xd;
    const TranslationSurface* px = &X0;
    if (opt.delaunay) {
        Xd = X0;
        make_delaunay(Xd);
        px = &Xd;
    }
    const TranslationSurface& X = *px;
    const VertexData vd = vertex_data(X);
    const bool want_classes = opt.classes && X.has_classes();
    const double tol = opt.tol;

    std::vector<Node> nodes;
    std::vector<int> frontier, next;
    std::vector<SaddleConnection> out;

    auto class_of = [&](int slot) -> Eigen::VectorXi { return X.edge_class.row(slot).transpose(); };

    auto emit = [&](cplx h, int start_corner, int end_vertex, int node) {
        SaddleConnection s;
        s.holonomy = h;
        s.start_vertex = vd.corner_vertex[start_corner];
        s.end_vertex = end_vertex;
        if (!opt.chains && !want_classes) {
            out.push_back(std::move(s));
            return;
        }
        std::vector<int> path;
        for (int i = node; i >= 0; i = nodes[i].parent) path.push_back(i);
        std::reverse(path.begin(), path.end());
        const int t0 = start_corner / 3, j0 = start_corner % 3;
        if (opt.chains) {
            s.chain.emplace_back(t0, j0);
            for (int i : path) s.chain.emplace_back(nodes[i].tri, nodes[i].entry);
        }
        if (want_classes) {
            Eigen::VectorXi ca = class_of(3 * t0 + j0);
            if (path.empty()) {
                s.cls = ca;
            } else {
                Eigen::VectorXi cb = -class_of(3 * t0 + (j0 + 2) % 3);
                for (size_t q = 0; q < path.size(); ++q) {
                    const Node& nd = nodes[path[q]];
                    const Eigen::VectorXi cc = ca + class_of(3 * nd.tri + (nd.entry + 1) % 3);
                    if (q + 1 == path.size()) {
                        s.cls = cc;
                        break;
                    }
                    const Node& nx = nodes[path[q + 1]];
                    const int via = X.glue[3 * nx.tri + nx.entry];
                    if (via == 3 * nd.tri + (nd.entry + 1) % 3) cb = cc;
                    else ca = cc;
                }
            }
        }
        out.push_back(std::move(s));
    };

    auto push_child = [&](int parent, int slot, cplx a, cplx b, cplx r, cplx l) {
        if (visible_distance(a, b, r, l) > L) return;
        const int p = X.glue[slot];
        if (static_cast<long>(nodes.size()) >= opt.node_budget)
            throw ResourceError("saddle connection unfolding exceeded its node budget of " +
                                std::to_string(opt.node_budget) + " chains");
        nodes.push_back(Node{p / 3, p % 3, parent, a, b, r, l});
        next.push_back(static_cast<int>(nodes.size()) - 1);
    };

    const int T = X.num_triangles();
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < 3; ++j) {
            const auto& e = X.triangles[t].e;
            const int corner = 3 * t + j;
            const cplx B = e[j], C = -e[(j + 2) % 3];
            if (std::abs(B) <= L && canonical(B, tol))
                emit(B, corner, vd.corner_vertex[3 * t + (j + 1) % 3], -1 - corner);
            push_child(-1 - corner, 3 * t + (j + 1) % 3, B, C, B, C);
        }
    }

    while (!next.empty()) {
        frontier.swap(next);
        next.clear();
        for (int id : frontier) {
            const Node nd = nodes[id];
            const auto& e = X.triangles[nd.tri].e;
            const int j1 = (nd.entry + 1) % 3, j2 = (nd.entry + 2) % 3;
            const cplx c = nd.a + e[j1];
            const double mc = std::abs(c);
            const bool right_ok = cross(nd.r, c) > tol * std::abs(nd.r) * mc;
            const bool left_ok = cross(c, nd.l) > tol * std::abs(nd.l) * mc;
            if (right_ok && left_ok) {
                if (mc <= L && canonical(c, tol)) {
                    int root = id;
                    while (nodes[root].parent >= 0) root = nodes[root].parent;
                    emit(c, -1 - nodes[root].parent, vd.corner_vertex[3 * nd.tri + j2], id);
                }
                push_child(id, 3 * nd.tri + j1, nd.a, c, nd.r, c);
                push_child(id, 3 * nd.tri + j2, c, nd.b, c, nd.l);
            } else if (!right_ok) {
                push_child(id, 3 * nd.tri + j2, c, nd.b, nd.r, nd.l);
            } else {
                push_child(id, 3 * nd.tri + j1, nd.a, c, nd.r, nd.l);
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const SaddleConnection& x, const SaddleConnection& y) {
        return std::abs(x.holonomy) < std::abs(y.holonomy);
    });
    return out;
}

cplx replay_chain(const TranslationSurface& X, const SaddleConnection& s) {
    if (s.chain.empty()) throw RuntimeError("saddle connection has no chain");
    const auto [t0, j0] = s.chain.front();
    const auto& e0 = X.triangles[t0].e;
    cplx a = e0[j0], b = -e0[(j0 + 2) % 3];
    if (s.chain.size() == 1) return a;
    for (size_t q = 1; q < s.chain.size(); ++q) {
        const auto [t, entry] = s.chain[q];
        const cplx c = a + X.triangles[t].e[(entry + 1) % 3];
        if (q + 1 == s.chain.size()) return c;
        const auto [tn, en] = s.chain[q + 1];
        if (X.glue[3 * tn + en] == 3 * t + (entry + 1) % 3) b = c;
        else a = c;
    }
    return a;
}

} // namespace flatreg
