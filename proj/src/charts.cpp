#include <cmath>

#include "flatreg/errors.hpp"
#include "flatreg/sampler.hpp"

namespace flatreg {

double ChartModel::box_volume() const {
    double v = 1.0;
    for (const auto& r : box) v *= r.volume();
    return v;
}

void ChartModel::set_box(double h) {
    box.assign(dim, ComplexRange{-h, h, -h, h});
}

ChartModel build_torus_chart(double half_width) {
    ChartModel c;
    c.name = "torus";
    c.dim = 2;
    c.signature = StratumSignature{{0}};
    c.set_box(half_width);
    c.area = [](const Eigen::VectorXcd& z) { return cross(z[0], z[1]); };
    c.admissible = [](const Eigen::VectorXcd& z) { return cross(z[0], z[1]) > 0.0; };
    c.build = [](const Eigen::VectorXcd& z) {
        const cplx u = z[0], v = z[1];
        TranslationSurface X;
        X.triangles = {Triangle{{u, v, -(u + v)}}, Triangle{{u + v, -u, -v}}};
        X.glue = {4, 5, 3, 2, 0, 1};
        X.edge_class.resize(6, 2);
        X.edge_class << 1, 0, 0, 1, -1, -1, 1, 1, -1, 0, 0, -1;
        return X;
    };
    return c;
}

namespace {

std::vector<cplx> octagon_sides(const Eigen::VectorXcd& z) {
    return {z[0], z[1], z[2], z[3], -z[0], -z[1], -z[2], -z[3]};
}

} // namespace

ChartModel build_h2_octagon_chart(double half_width) {
    ChartModel c;
    c.name = "h2-octagon";
    c.dim = 4;
    c.signature = StratumSignature{{2}};
    c.set_box(half_width);
    c.area = [](const Eigen::VectorXcd& z) { return signed_polygon_area(polygon_vertices(octagon_sides(z))); };
    c.admissible = [](const Eigen::VectorXcd& z) {
        const auto v = polygon_vertices(octagon_sides(z));
        return signed_polygon_area(v) > 0.0 && is_simple_polygon(v);
    };
    c.build = [](const Eigen::VectorXcd& z) {
        PolygonGluing P;
        P.sides = {octagon_sides(z)};
        std::vector<Eigen::VectorXi> cls;
        for (int i = 0; i < 8; ++i) {
            Eigen::VectorXi e = Eigen::VectorXi::Zero(4);
            e[i % 4] = i < 4 ? 1 : -1;
            cls.push_back(e);
        }
        P.side_class = {cls};
        for (int i = 0; i < 4; ++i) P.pairs.push_back({{0, i}, {0, i + 4}});
        P.zeros = {{0, 2}};
        return from_polygons(P);
    };
    return c;
}

ChartModel chart_by_name(const std::string& name, double half_width) {
    if (name == "torus") return build_torus_chart(half_width);
    if (name == "h2-octagon") return build_h2_octagon_chart(half_width);
    throw ConfigError("unknown chart '" + name + "' (expected torus or h2-octagon)");
}

} // namespace flatreg
