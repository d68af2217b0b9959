#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "flatreg/surface.hpp"

namespace fixtures {

using flatreg::cplx;

// Torus with lattice Zu + Zv and one marked point; classes in the basis (u, v).
inline flatreg::TranslationSurface torus(cplx u, cplx v) {
    flatreg::PolygonGluing P;
    P.sides = {{u, v, -u, -v}};
    P.pairs = {{{0, 0}, {0, 2}}, {{0, 1}, {0, 3}}};
    Eigen::VectorXi eu(2), ev(2);
    eu << 1, 0;
    ev << 0, 1;
    P.side_class = {{eu, ev, -eu, -ev}};
    return flatreg::from_polygons(P);
}

inline flatreg::TranslationSurface octagon(const std::vector<cplx>& z) {
    flatreg::PolygonGluing P;
    std::vector<cplx> s;
    for (cplx w : z) s.push_back(w);
    for (cplx w : z) s.push_back(-w);
    P.sides = {s};
    std::vector<Eigen::VectorXi> cls;
    for (int i = 0; i < 8; ++i) {
        Eigen::VectorXi c = Eigen::VectorXi::Zero(4);
        c[i % 4] = i < 4 ? 1 : -1;
        cls.push_back(c);
    }
    P.side_class = {cls};
    for (int i = 0; i < 4; ++i) P.pairs.push_back({{0, i}, {0, i + 4}});
    P.zeros = {{0, 2}};
    return flatreg::from_polygons(P);
}

// Canonical (upper half plane) primitive lattice vectors of length <= L.
inline std::vector<cplx> primitive_vectors(cplx u, cplx v, double L) {
    std::vector<cplx> out;
    const double area = std::abs(flatreg::cross(u, v));
    const int R = static_cast<int>(std::ceil(L * (std::abs(u) + std::abs(v)) / area)) + 2;
    for (int p = -R; p <= R; ++p)
        for (int q = -R; q <= R; ++q) {
            if (std::gcd(std::abs(p), std::abs(q)) != 1) continue;
            const cplx w = double(p) * u + double(q) * v;
            if (std::abs(w) > L) continue;
            const double m = std::abs(w);
            const bool canon = w.imag() > 1e-10 * m || (std::abs(w.imag()) <= 1e-10 * m && w.real() > 0);
            if (canon) out.push_back(w);
        }
    return out;
}

} // namespace fixtures
