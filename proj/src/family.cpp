#include <cmath>
#include <numbers>

#include "flatreg/errors.hpp"
#include "flatreg/multiscale.hpp"

namespace flatreg {

namespace {

// Triangulated fundamental parallelogram of a torus, with extra points inserted
// by 1-to-3 splits. Each vertex carries its position class in the period basis.
struct PlanarMesh {
    std::vector<cplx> pos;
    std::vector<Eigen::VectorXi> cls;
    std::vector<std::array<int, 3>> tris;
    cplx w1, w2;

    PlanarMesh(cplx omega1, cplx omega2, int rank, int i1, int i2) : w1(omega1), w2(omega2) {
        Eigen::VectorXi z = Eigen::VectorXi::Zero(rank), a = z, b = z;
        a[i1] = 1;
        b[i2] = 1;
        pos = {0.0, w1, w1 + w2, w2};
        cls = {z, a, a + b, b};
        tris = {{0, 1, 2}, {0, 2, 3}};
    }

    int insert(cplx p, const Eigen::VectorXi& c) {
        for (size_t t = 0; t < tris.size(); ++t) {
            const auto [i, j, k] = tris[t];
            const double A = cross(pos[j] - pos[i], pos[k] - pos[i]);
            const double l0 = cross(pos[j] - p, pos[k] - p) / A;
            const double l1 = cross(pos[k] - p, pos[i] - p) / A;
            const double l2 = cross(pos[i] - p, pos[j] - p) / A;
            const double m = std::min({l0, l1, l2});
            if (m < -1e-14) continue;
            if (m < 1e-12) throw RuntimeError("a node point lies on an edge of the top-level triangulation");
            const int v = static_cast<int>(pos.size());
            pos.push_back(p);
            cls.push_back(c);
            tris[t] = {i, j, v};
            tris.push_back({j, k, v});
            tris.push_back({k, i, v});
            return v;
        }
        throw RuntimeError("a node point falls outside the top-level torus; the plumbing radius is too large");
    }

    TranslationSurface surface() const {
        TranslationSurface X;
        const int rank = static_cast<int>(cls[0].size());
        const int F = static_cast<int>(tris.size());
        X.triangles.resize(F);
        X.glue.assign(3 * F, -1);
        X.edge_class.resize(3 * F, rank);
        std::vector<std::pair<int, int>> ends(3 * F);
        for (int t = 0; t < F; ++t)
            for (int k = 0; k < 3; ++k) {
                const int a = tris[t][k], b = tris[t][(k + 1) % 3];
                X.triangles[t].e[k] = pos[b] - pos[a];
                X.edge_class.row(3 * t + k) = (cls[b] - cls[a]).transpose();
                ends[3 * t + k] = {a, b};
            }
        for (int s = 0; s < 3 * F; ++s) {
            if (X.glue[s] >= 0) continue;
            for (int u = s + 1; u < 3 * F; ++u) {
                if (X.glue[u] >= 0) continue;
                bool match = ends[u].first == ends[s].second && ends[u].second == ends[s].first;
                if (!match) {
                    // sides of the parallelogram glue by a lattice translation
                    const cplx d0 = pos[ends[u].second] - pos[ends[s].first];
                    const cplx d1 = pos[ends[u].first] - pos[ends[s].second];
                    const bool lattice = std::abs(d0 - d1) < 1e-12 &&
                                         (std::abs(std::abs(d0) - std::abs(w1)) < 1e-12 ||
                                          std::abs(std::abs(d0) - std::abs(w2)) < 1e-12) &&
                                         (std::abs(d0 - w1) < 1e-12 || std::abs(d0 + w1) < 1e-12 ||
                                          std::abs(d0 - w2) < 1e-12 || std::abs(d0 + w2) < 1e-12);
                    match = lattice && std::abs(X.edge(s) + X.edge(u)) < 1e-12;
                }
                if (match) {
                    X.glue[s] = u;
                    X.glue[u] = s;
                    break;
                }
            }
        }
        for (int s = 0; s < 3 * F; ++s)
            if (X.glue[s] < 0) throw RuntimeError("internal error: unglued edge in the top-level torus");
        return X;
    }
};

Eigen::VectorXi unit(int rank, int i) {
    Eigen::VectorXi v = Eigen::VectorXi::Zero(rank);
    v[i] = 1;
    return v;
}

// Replace the slit edge (class `slit_index`) by a cylinder with sides `slit` and `cross`.
void glue_handle(TranslationSurface& X, int slit_index, int cross_index, cplx slit, cplx cross,
                 const Eigen::VectorXi& start_class) {
    const int rank = static_cast<int>(X.edge_class.cols());
    const Eigen::VectorXi e_s = unit(rank, slit_index);
    int a = -1;
    for (int s = 0; s < static_cast<int>(X.glue.size()); ++s)
        if (X.edge_class.row(s).transpose() == e_s) {
            a = s;
            break;
        }
    if (a < 0 || std::abs(X.edge(a) - slit) > 1e-9 * std::max(1.0, std::abs(slit)))
        throw RuntimeError("slit is not an edge of the triangulation; node discs overlap other geometry");
    const int b = X.glue[a];

    const int t0 = X.num_triangles();
    X.triangles.push_back(Triangle{{slit, cross, -(slit + cross)}});
    X.triangles.push_back(Triangle{{slit + cross, -slit, -cross}});
    X.glue.resize(3 * (t0 + 2), -1);
    Eigen::MatrixXi C(X.edge_class.rows() + 6, rank);
    C.topRows(X.edge_class.rows()) = X.edge_class;
    const Eigen::VectorXi c0 = start_class, c1 = start_class + e_s, c3 = start_class + unit(rank, cross_index),
                          c2 = c1 + unit(rank, cross_index);
    const int base = 3 * t0;
    C.row(base + 0) = (c1 - c0).transpose();
    C.row(base + 1) = (c2 - c1).transpose();
    C.row(base + 2) = (c0 - c2).transpose();
    C.row(base + 3) = (c2 - c0).transpose();
    C.row(base + 4) = (c3 - c2).transpose();
    C.row(base + 5) = (c0 - c3).transpose();
    X.edge_class = C;

    auto link = [&](int u, int v) {
        X.glue[u] = v;
        X.glue[v] = u;
    };
    link(base + 2, base + 3);  // diagonal
    link(base + 1, base + 5);  // sides of the cylinder
    link(base + 0, b);         // bottom of the cylinder to the lower side of the slit
    link(base + 4, a);         // top of the cylinder to the upper side of the slit
}

void assign_zero_orders(TranslationSurface& X) {
    const VertexData vd = vertex_data(X);
    X.zeros.clear();
    for (int v = 0; v < vd.count(); ++v) {
        const int order = static_cast<int>(std::lround(vd.angle[v] / (2.0 * std::numbers::pi))) - 1;
        if (order > 0) X.zeros[v] = order;
    }
}

cplx lattice_point(const FamilySpec& spec, cplx coords) {
    return coords.real() * spec.omega1 + coords.imag() * spec.omega2;
}

cplx param(const std::map<int, cplx>& m, int key, const char* what) {
    const auto it = m.find(key);
    if (it == m.end()) throw ConfigError(std::string("missing ") + what);
    if (!(std::abs(it->second) > 0.0 && std::abs(it->second) < 1.0))
        throw ConfigError(std::string(what) + " must satisfy 0 < |t| < 1");
    return it->second;
}

void finish(FamilyPoint& out, TranslationSurface X) {
    assign_zero_orders(X);
    const ValidationReport rep = validate_surface(X, out.signature, 1e-8);
    if (!rep.ok()) {
        std::string msg = "assembled surface is invalid:";
        for (const auto& s : rep.structural) msg += " " + s + ";";
        for (const auto& s : rep.metric) msg += " " + s + ";";
        throw RuntimeError(msg);
    }
    out.surface_periods = period_vector(X);
    out.surface = std::move(X);
    out.concrete = true;
}

} // namespace

EnhancedLevelGraph family_graph(const FamilySpec& spec) {
    EnhancedLevelGraph G;
    switch (spec.kind) {
    case FamilyKind::TwoLevel:
        G.vertices = {{1, 0}, {1, -1}};
        G.edges = {{0, 1, EdgeKind::Vertical, 1, 0}};
        G.half_edges = {{0, 0}, {1, 2}};
        break;
    case FamilyKind::ThreeLevel:
        G.vertices = {{1, 0}, {1, -1}, {1, -2}};
        G.edges = {{0, 1, EdgeKind::Vertical, 1, 0}, {1, 2, EdgeKind::Vertical, 1, 0}};
        G.half_edges = {{0, 0}, {1, 2}, {2, 2}};
        break;
    case FamilyKind::Horizontal:
        G.vertices = {{1, 0}};
        G.edges = {{0, 0, EdgeKind::Horizontal, 1, 0}};
        G.half_edges = {{0, 0}, {0, 2}};
        break;
    case FamilyKind::Residue:
        // two nodes into one lower component, so its poles may carry residues +-r
        G.vertices = {{spec.b, 0}, {0, -1}};
        G.edges = {{0, 1, EdgeKind::Vertical, spec.b, 0}, {0, 1, EdgeKind::Vertical, spec.b, 0}};
        G.half_edges = {{1, 2 * spec.b}};
        break;
    }
    return G;
}

FamilyPoint assemble_synthetic_family(const FamilySpec& spec, const PlumbingParams& params, const LogBranch& branch) {
    FamilyPoint out;
    const cplx p = spec.p;
    out.signature = signature_of(family_graph(spec));
    auto cycle = [&](std::string name, int level, cplx prefactor, cplx pert, cplx plumbing = 0.0, cplx lower = 0.0) {
        CycleTerms c;
        c.name = std::move(name);
        c.level = level;
        c.prefactor = prefactor;
        c.pert = pert;
        c.plumbing = plumbing;
        c.lower = lower;
        out.cycles.push_back(c);
        return out.cycles.size() - 1;
    };

    switch (spec.kind) {
    case FamilyKind::TwoLevel: {
        // basis: omega1, omega2, slit, cross, zero (marked point to the zero)
        const cplx t = param(params.t, -1, "t for level -1");
        out.t = t;
        const cplx M = lattice_point(spec, spec.node);
        const cplx s = t * spec.slit, d = t * spec.cross, P = M - 0.5 * s;
        cycle("omega1", 0, 1.0, spec.omega1);
        cycle("omega2", 0, 1.0, spec.omega2);
        cycle("slit", -1, t, spec.slit);
        cycle("cross", -1, t, spec.cross);
        cycle("zero", 0, 1.0, M + p, -annulus_period(1, 0.0, t, p, branch), t * (-0.5 * spec.slit - 1.0));

        PlanarMesh mesh(spec.omega1, spec.omega2, 5, 0, 1);
        mesh.insert(P, unit(5, 4));
        mesh.insert(P + s, unit(5, 4) + unit(5, 2));
        TranslationSurface X = mesh.surface();
        make_delaunay(X);
        glue_handle(X, 2, 3, s, d, unit(5, 4));
        finish(out, std::move(X));
        break;
    }
    case FamilyKind::ThreeLevel: {
        // basis: omega1, omega2, slit1, cross1, slit2, cross2, zero1, zero2
        const cplx t1 = param(params.t, -1, "t for level -1");
        const cplx t2 = param(params.t, -2, "t for level -2");
        out.t = t1;
        const cplx M = lattice_point(spec, spec.node);
        const cplx s1 = t1 * spec.slit, d1 = t1 * spec.cross;
        const cplx s2 = t1 * t2 * spec.slit2, d2 = t1 * t2 * spec.cross2;
        const cplx P1 = M - 0.5 * s1;
        const cplx P2 = M + t1 * spec.node2 - 0.5 * s2;
        cycle("omega1", 0, 1.0, spec.omega1);
        cycle("omega2", 0, 1.0, spec.omega2);
        cycle("slit1", -1, t1, spec.slit);
        cycle("cross1", -1, t1, spec.cross);
        cycle("slit2", -2, t1 * t2, spec.slit2);
        cycle("cross2", -2, t1 * t2, spec.cross2);
        cycle("zero1", 0, 1.0, M + p, -annulus_period(1, 0.0, t1, p, branch), t1 * (-0.5 * spec.slit - 1.0));
        const cplx middle = t1 * (spec.node2 + p - 1.0) - t1 * annulus_period(1, 0.0, t2, p, branch) +
                            t1 * t2 * (-0.5 * spec.slit2 - 1.0);
        cycle("zero2", 0, 1.0, M + p, -annulus_period(1, 0.0, t1, p, branch), middle);

        PlanarMesh mesh(spec.omega1, spec.omega2, 8, 0, 1);
        mesh.insert(P1, unit(8, 6));
        mesh.insert(P1 + s1, unit(8, 6) + unit(8, 2));
        mesh.insert(P2, unit(8, 7));
        mesh.insert(P2 + s2, unit(8, 7) + unit(8, 4));
        TranslationSurface X = mesh.surface();
        make_delaunay(X);
        glue_handle(X, 2, 3, s1, d1, unit(8, 6));
        glue_handle(X, 4, 5, s2, d2, unit(8, 7));
        finish(out, std::move(X));
        break;
    }
    case FamilyKind::Horizontal: {
        // basis: omega1, omega2, circumference, cross, zero
        const cplx th = param(params.t_h, 0, "t for horizontal edge 0");
        out.t = th;
        const cplx w = spec.slit;
        const cplx r = w / cplx(0.0, 2.0 * std::numbers::pi);  // residue of the simple poles
        const cplx M = lattice_point(spec, spec.node);
        const cplx P = M - 0.5 * w;
        const cplx crossing = 2.0 * cylinder_cross_period(r, th, branch);
        cycle("omega1", 0, 1.0, spec.omega1);
        cycle("omega2", 0, 1.0, spec.omega2);
        cycle("circumference", 0, 1.0, w);
        const auto k = cycle("cross", 0, 1.0, spec.cross_offset, crossing);
        out.cycles[k].crosses_cylinder = true;
        cycle("zero", 0, 1.0, P);

        const cplx d = spec.cross_offset + crossing;
        if (!(cross(w, d) > 0.0)) throw RuntimeError("degenerating cylinder has nonpositive area");
        PlanarMesh mesh(spec.omega1, spec.omega2, 5, 0, 1);
        mesh.insert(P, unit(5, 4));
        mesh.insert(P + w, unit(5, 4) + unit(5, 2));
        TranslationSurface X = mesh.surface();
        make_delaunay(X);
        glue_handle(X, 2, 3, w, d, unit(5, 4));
        finish(out, std::move(X));
        break;
    }
    case FamilyKind::Residue: {
        if (spec.b < 1) throw ConfigError("enhancement must be at least 1");
        const cplx T = param(params.t, -1, "t for level -1");
        const cplx t = std::pow(T, spec.b);
        out.t = t;
        const cplx r = spec.residue + spec.residue_slope * t;
        cycle("gamma", 0, 1.0, spec.pert, annulus_period(spec.b, r, T, p, branch), t * spec.lower);
        out.surface_periods = Eigen::VectorXcd(1);
        out.surface_periods[0] = out.cycles[0].total();
        break;
    }
    }
    return out;
}

} // namespace flatreg
