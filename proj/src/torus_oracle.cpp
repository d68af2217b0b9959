#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "flatreg/errors.hpp"
#include "flatreg/sampler.hpp"

namespace flatreg {

std::pair<double, double> successive_minima(cplx u, cplx v) {
    for (int it = 0; it < 200; ++it) {
        if (std::norm(u) > std::norm(v)) std::swap(u, v);
        const double m = std::round(dot(v, u) / std::norm(u));
        if (m == 0.0) break;
        v -= m * u;
    }
    if (std::norm(u) > std::norm(v)) std::swap(u, v);
    return {std::abs(u), std::abs(v)};
}

namespace {

using Poly = std::vector<cplx>;

// Keep the part of a convex polygon where cross(u, v) <= c (or >= c if upper is false).
Poly clip(const Poly& P, cplx u, double c, bool upper) {
    Poly out;
    const size_t n = P.size();
    auto val = [&](cplx v) { return upper ? c - cross(u, v) : cross(u, v) - c; };
    for (size_t i = 0; i < n; ++i) {
        const cplx a = P[i], b = P[(i + 1) % n];
        const double fa = val(a), fb = val(b);
        if (fa >= 0) out.push_back(a);
        if ((fa >= 0) != (fb >= 0)) out.push_back(a + (b - a) * (fa / (fa - fb)));
    }
    return out;
}

double poly_area(const Poly& P) {
    if (P.size() < 3) return 0.0;
    return signed_polygon_area(P);
}

// Signed area of the disc of radius r at the origin intersected with triangle (0, a, b).
double disc_triangle(cplx a, cplx b, double r) {
    auto sector = [&](cplx x, cplx y) { return 0.5 * r * r * std::atan2(cross(x, y), dot(x, y)); };
    const double ra = std::abs(a), rb = std::abs(b);
    if (ra <= r && rb <= r) return 0.5 * cross(a, b);
    const cplx d = b - a;
    const double A = std::norm(d), B = dot(a, d), C = std::norm(a) - r * r;
    const double disc = B * B - A * C;
    if (A == 0.0) return 0.0;
    if (disc <= 0.0) return sector(a, b);
    const double sq = std::sqrt(disc);
    const double t1 = (-B - sq) / A, t2 = (-B + sq) / A;
    if (ra <= r) {
        const cplx p = a + t2 * d;
        return 0.5 * cross(a, p) + sector(p, b);
    }
    if (rb <= r) {
        const cplx p = a + t1 * d;
        return sector(a, p) + 0.5 * cross(p, b);
    }
    if (t1 >= 0.0 && t2 <= 1.0) {
        const cplx p1 = a + t1 * d, p2 = a + t2 * d;
        return sector(a, p1) + 0.5 * cross(p1, p2) + sector(p2, b);
    }
    return sector(a, b);
}

double disc_polygon_area(cplx center, double r, const Poly& P) {
    double s = 0.0;
    for (size_t i = 0; i < P.size(); ++i) s += disc_triangle(P[i] - center, P[(i + 1) % P.size()] - center, r);
    return s;
}

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Number of p in [lo, hi] coprime to q.
long coprime_count(long q, long lo, long hi) {
    if (hi < lo) return 0;
    std::vector<long> primes;
    long m = q;
    for (long p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            primes.push_back(p);
            while (m % p == 0) m /= p;
        }
    if (m > 1) primes.push_back(m);
    long total = 0;
    const int k = static_cast<int>(primes.size());
    for (int mask = 0; mask < (1 << k); ++mask) {
        long d = 1;
        int bits = 0;
        for (int i = 0; i < k; ++i)
            if (mask & (1 << i)) {
                d *= primes[i];
                ++bits;
            }
        const long c = floor_div(hi, d) - floor_div(lo - 1, d);
        total += (bits % 2 ? -c : c);
    }
    return total;
}

// Parameters s with x0 - s*u inside [-B, B]^2.
bool line_in_box(cplx x0, cplx u, double B, double& lo, double& hi) {
    lo = -1e300;
    hi = 1e300;
    const double xs[2] = {x0.real(), x0.imag()}, us[2] = {u.real(), u.imag()};
    for (int k = 0; k < 2; ++k) {
        if (us[k] == 0.0) {
            if (std::abs(xs[k]) > B) return false;
            continue;
        }
        double a = (xs[k] - B) / us[k], b = (xs[k] + B) / us[k];
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    }
    return lo <= hi;
}

Poly square(double b) { return {cplx(-b, -b), cplx(b, -b), cplx(b, b), cplx(-b, b)}; }

struct Slice {
    double value;
    double tail;
};

// Area of v in the square for which the torus (u, v) has 0 < area <= 1 and a
// primitive vector of length <= eps*sqrt(area). Requires eps < 1 so the pieces are disjoint.
Slice single_connection_slice(cplx u, double eps, double b, int Q) {
    const double nu = std::abs(u);
    if (nu == 0.0) return {0.0, 0.0};
    const Poly K = clip(square(b), u, 1.0, true);
    double total = 0.0;
    const double low = nu * nu / (eps * eps);
    if (low < 1.0) total += poly_area(clip(K, u, low, false));

    const cplx iu(-u.imag(), u.real());
    for (int q = 1; q <= Q; ++q) {
        const double kappa = eps * eps / (double(q) * q);
        const double rho = 0.5 * kappa * nu;
        const double h = 1.0 / nu - rho;  // centre to the line cross(u, v) = 1
        double inner_area = std::numbers::pi * rho * rho;
        if (h < rho) {
            const double cap = rho * rho * std::acos(h / rho) - h * std::sqrt(rho * rho - h * h);
            inner_area -= cap;
        }
        const cplx c0 = 0.5 * kappa * iu;
        double slo, shi;
        if (!line_in_box(c0, u, b + rho, slo, shi)) continue;
        const long plo = static_cast<long>(std::ceil(q * slo)), phi = static_cast<long>(std::floor(q * shi));
        long ilo = phi + 1, ihi = phi;
        double a, c;
        if (b > rho && line_in_box(c0, u, b - rho, a, c)) {
            ilo = std::max(plo, static_cast<long>(std::ceil(q * a)));
            ihi = std::min(phi, static_cast<long>(std::floor(q * c)));
        }
        if (ilo <= ihi) total += inner_area * static_cast<double>(coprime_count(q, ilo, ihi));
        else ilo = phi + 1, ihi = phi;
        auto boundary = [&](long from, long to) {
            for (long p = from; p <= to; ++p)
                if (std::gcd(std::abs(p), static_cast<long>(q)) == 1)
                    total += disc_polygon_area(c0 - (double(p) / q) * u, rho, K);
        };
        boundary(plo, std::min(phi, ilo - 1));
        boundary(std::max(plo, ihi + 1), phi);
    }
    // discs with denominator above Q: about sqrt(2)*pi*b*eps^4*|u| / (4 Q^2) in total; reported per unit 1/Q^2
    const double tail = 0.25 * std::sqrt(2.0) * std::numbers::pi * b * std::pow(eps, 4) * nu;
    return {total, tail};
}

double saturated_slice(cplx u, double b) {
    const Poly K = clip(square(b), u, 1.0, true);
    return poly_area(clip(K, u, 0.0, false));
}

double lattice_slice(cplx u, const std::vector<double>& eps, double b, int m) {
    const double lo = *std::min_element(eps.begin(), eps.end());
    const double hi = *std::max_element(eps.begin(), eps.end());
    const bool two = eps.size() == 2;
    const double h = 2.0 * b / m;
    long count = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const cplx v(-b + (i + 0.5) * h, -b + (j + 0.5) * h);
            const double A = cross(u, v);
            if (!(A > 0.0 && A <= 1.0)) continue;
            const auto [l1, l2] = successive_minima(u, v);
            const double s = std::sqrt(A);
            if (l1 > lo * s) continue;
            if (two && l2 > hi * s) continue;
            ++count;
        }
    return static_cast<double>(count) * h * h;
}

// 3-point Gauss-Legendre on [0, b]^2 split into n x n cells.
template <class F>
double quadrant_integral(F&& f, double b, int n) {
    static const double x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double h = b / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) {
                    const cplx u((i + 0.5 + 0.5 * x[a]) * h, (j + 0.5 + 0.5 * x[c]) * h);
                    s += w[a] * w[c] * f(u);
                }
    return s * h * h / 4.0;
}

// Integral over the whole square of f, using f(iu) = f(u) and f(conj u) = f(u):
// eight copies of the sector 0 <= arg u <= pi/4, in polar coordinates.
template <class F>
OracleValue sector_integral(F&& f, double b, double breakpoint, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    double err_total = 0.0;
    auto radial = [&](double theta) {
        const double R = b / std::cos(theta);
        const cplx dir = std::polar(1.0, theta);
        auto g = [&](double r) { return r * f(r * dir); };
        double err = 0.0, v = 0.0;
        if (breakpoint > 0.0 && breakpoint < R) {
            v += gauss_kronrod<double, 15>::integrate(g, 0.0, breakpoint, 10, tol, &err);
            double e2 = 0.0;
            v += gauss_kronrod<double, 15>::integrate(g, breakpoint, R, 10, tol, &e2);
            err += e2;
        } else {
            v = gauss_kronrod<double, 15>::integrate(g, 0.0, R, 10, tol, &err);
        }
        err_total = std::max(err_total, err);
        return v;
    };
    double outer_err = 0.0;
    const double v = gauss_kronrod<double, 15>::integrate(radial, 0.0, std::numbers::pi / 4, 10, tol, &outer_err);
    return OracleValue{8.0 * v, 8.0 * (outer_err + err_total * std::numbers::pi / 4)};
}

} // namespace

OracleValue torus_exact_oracle(const std::vector<double>& eps, const OracleOptions& opt) {
    if (eps.size() != 1 && eps.size() != 2) throw ConfigError("torus oracle supports one or two connections");
    for (double e : eps)
        if (!(e > 0.0)) throw ConfigError("epsilon values must be positive");
    const double b = opt.half_width;
    const double hermite = std::sqrt(2.0 / std::sqrt(3.0));  // longest possible shortest vector at unit area

    if (eps.size() == 1) {
        const double e = eps[0];
        if (e >= hermite) return sector_integral([&](cplx u) { return saturated_slice(u, b); }, b, 0.0, opt.tolerance);
        if (e < 1.0) {
            const int Q = opt.max_denominator;
            OracleValue v = sector_integral([&](cplx u) { return single_connection_slice(u, e, b, Q).value; }, b, e,
                                            opt.tolerance);
            v.error += 4.0 * quadrant_integral(
                                 [&](cplx u) { return single_connection_slice(u, e, b, 0).tail / (double(Q) * Q); }, b, 8);
            return v;
        }
    } else if (eps[0] * eps[1] < 1.0) {
        // two independent lattice vectors satisfy |w1||w2| >= area
        return OracleValue{0.0, 0.0};
    }
    const int n = opt.resolution;
    auto slice = [&](cplx u) { return lattice_slice(u, eps, b, opt.inner_resolution); };
    const double fine = 4.0 * quadrant_integral(slice, b, n);
    const double coarse = 4.0 * quadrant_integral(slice, b, std::max(1, n / 2));
    return OracleValue{fine, std::abs(fine - coarse)};
}

} // namespace flatreg
