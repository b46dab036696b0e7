#pragma once

#include "obscout/oracle.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testsupport {

using namespace obscout;

inline Point pt(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}

inline Point pt3(double x, double y, double z) {
    Point p(3);
    p << x, y, z;
    return p;
}

inline WorkspaceMeta make_meta(int dim, double lo, double hi, double eps, double inradius,
                               double circumradius) {
    return {dim, {Vec::Constant(dim, lo), Vec::Constant(dim, hi)}, eps, inradius, circumradius};
}

inline ConvexShape ball(const Point& c, double r) {
    BallShape s;
    s.center = c;
    s.radius = r;
    return s;
}

inline ConvexShape box(const Point& lo, const Point& hi) {
    BoxShape s;
    s.box = {lo, hi};
    return s;
}

inline ConvexShape axis_ellipse(const Point& c, double a, double b) {
    EllipsoidShape s;
    s.center = c;
    s.shape = Mat::Zero(2, 2);
    s.shape(0, 0) = 1.0 / (a * a);
    s.shape(1, 1) = 1.0 / (b * b);
    return s;
}

// Convex polygon: vertices at sorted random angles on a rotated ellipse.
inline std::vector<Point> random_convex_polygon(std::mt19937_64& rng, int nv, const Point& center,
                                                double semi_lo = 0.6, double semi_hi = 2.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double a = semi_lo + (semi_hi - semi_lo) * unit(rng);
    const double b = semi_lo + (semi_hi - semi_lo) * unit(rng);
    const double rot = 2.0 * M_PI * unit(rng);
    std::vector<double> angles(nv);
    for (auto& t : angles) t = 2.0 * M_PI * unit(rng);
    std::sort(angles.begin(), angles.end());
    std::vector<Point> verts;
    for (double t : angles) {
        const double x = a * std::cos(t), y = b * std::sin(t);
        verts.push_back(pt(center[0] + std::cos(rot) * x - std::sin(rot) * y,
                           center[1] + std::sin(rot) * x + std::cos(rot) * y));
    }
    return verts;
}

// Convex-position 3-D vertex set: points on a random axis-aligned ellipsoid.
inline std::vector<Point> random_polytope_3d(std::mt19937_64& rng, int nv, const Point& center) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double a = 0.8 + 1.2 * unit(rng);
    const double b = 0.8 + 1.2 * unit(rng);
    const double c = 0.8 + 1.2 * unit(rng);
    std::vector<Point> verts;
    for (int i = 0; i < nv; ++i) {
        Vec g(3);
        g << gauss(rng), gauss(rng), gauss(rng);
        g.normalize();
        verts.push_back(pt3(center[0] + a * g[0], center[1] + b * g[1], center[2] + c * g[2]));
    }
    return verts;
}

inline ConvexShape polytope(std::vector<Point> verts) {
    PolytopeShape s;
    s.vertices = std::move(verts);
    return s;
}

inline double polygon_area(const std::vector<Point>& verts) {
    double acc = 0.0;
    for (size_t i = 0; i < verts.size(); ++i) {
        const Point& a = verts[i];
        const Point& b = verts[(i + 1) % verts.size()];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    return std::abs(acc) / 2.0;
}

// --- chi-squared quantile (regularized incomplete gamma + bisection)

inline double gammp(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 0.0;
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for Q, then P = 1 - Q
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double chi2_cdf(double x, int dof) { return gammp(dof / 2.0, x / 2.0); }

inline double chi2_quantile(double p, int dof) {
    double lo = 0.0, hi = 10.0 * dof + 100.0;
    while (chi2_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, dof) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace testsupport
