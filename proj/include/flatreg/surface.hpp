#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace flatreg {

using cplx = std::complex<double>;

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

struct StratumSignature {
    std::vector<int> zero_orders;  // order 0 entries are marked points

    int genus() const;
    int num_points() const { return static_cast<int>(zero_orders.size()); }
    int dimension() const { return 2 * genus() + num_points() - 1; }
};

// Edge k of a triangle runs from vertex k to vertex k+1; the three edge
// vectors go counterclockwise and sum to zero. Edge slots are numbered
// 3*triangle + k.
struct Triangle {
    std::array<cplx, 3> e;
};

struct TranslationSurface {
    std::vector<Triangle> triangles;
    std::vector<int> glue;        // slot -> partner slot, -1 if unglued
    std::map<int, int> zeros;     // vertex id -> order; unlisted vertices have order 0
    // Optional relative homology class of each slot in a fixed integral basis.
    // Rows are slots; partner slots carry negated rows. Empty if unknown.
    Eigen::MatrixXi edge_class;

    int num_triangles() const { return static_cast<int>(triangles.size()); }
    cplx edge(int slot) const { return triangles[slot / 3].e[slot % 3]; }
    bool has_classes() const { return edge_class.rows() > 0; }
};

// Vertex ids of every corner (3*t + k is the corner at vertex k of t), numbered
// by first appearance, plus the total angle around each vertex.
struct VertexData {
    std::vector<int> corner_vertex;
    std::vector<double> angle;
    int count() const { return static_cast<int>(angle.size()); }
};

VertexData vertex_data(const TranslationSurface& X);

struct ValidationReport {
    std::vector<std::string> structural;  // gluing problems
    std::vector<std::string> metric;      // closure, holonomy, angle, area, stratum
    int genus = 0;
    double area = 0.0;
    bool ok() const { return structural.empty() && metric.empty(); }
};

ValidationReport validate_surface(const TranslationSurface& X, const StratumSignature& sig,
                                  double tol = 1e-9);

double area(const TranslationSurface& X);
TranslationSurface scaled(const TranslationSurface& X, double s);
TranslationSurface transformed(const TranslationSurface& X, const Eigen::Matrix2d& g);

// Polygons glued along sides. Each polygon is its side vectors in ccw order.
struct SideRef {
    int polygon;
    int side;
};

struct PolygonGluing {
    std::vector<std::vector<cplx>> sides;
    std::vector<std::pair<SideRef, SideRef>> pairs;
    // Optional class of each side: side_class[polygon][side] (length = basis rank).
    std::vector<std::vector<Eigen::VectorXi>> side_class;
    std::map<int, int> zeros;  // applied after triangulation, keyed by final vertex ids
};

bool is_simple_polygon(const std::vector<cplx>& vertices);
double signed_polygon_area(const std::vector<cplx>& vertices);
std::vector<cplx> polygon_vertices(const std::vector<cplx>& sides);

// Ear clipping. Returns ccw vertex-index triples of a simple ccw polygon.
std::vector<std::array<int, 3>> ear_clip(const std::vector<cplx>& vertices);

TranslationSurface from_polygons(const PolygonGluing& P);

// Flip edges until every edge is locally Delaunay. Vertex orders are carried along.
void make_delaunay(TranslationSurface& X, int max_flips = 100000);

struct SaddleConnection {
    cplx holonomy;
    int start_vertex = -1;
    int end_vertex = -1;
    std::vector<std::pair<int, int>> chain;  // (triangle, entry edge); first entry is the start corner
    Eigen::VectorXi cls;                     // empty if the surface has no classes
};

struct EnumerateOptions {
    long node_budget = 1000000;
    bool chains = true;
    bool classes = true;
    bool delaunay = true;
    double tol = 1e-10;
};

std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& X, double L,
                                                           const EnumerateOptions& opt = {});

// Developed displacement of a chain, replayed from the triangles; equals the
// holonomy for a genuine connection.
cplx replay_chain(const TranslationSurface& X, const SaddleConnection& s);

bool are_parallel(const SaddleConnection& s1, const SaddleConnection& s2, double tau = 1e-12);
bool are_parallel(cplx h1, cplx h2, double tau = 1e-12);

struct LinearSubspace {
    int ambient_dim = 0;
    Eigen::MatrixXcd basis;  // rows span W inside the chart coordinates
    bool real = true;

    static LinearSubspace full(int m);
    int dim() const { return static_cast<int>(basis.rows()); }
};

int independence_rank(const std::vector<Eigen::VectorXi>& classes, const LinearSubspace& W,
                      double tau = 1e-10);
int complex_rank(const Eigen::MatrixXcd& M, double tau = 1e-10);

// Period of each basis class, recovered from edge holonomies by least squares.
Eigen::VectorXcd period_vector(const TranslationSurface& X);

std::string to_json(const TranslationSurface& X);
TranslationSurface surface_from_json(const std::string& text);

} // namespace flatreg
