#pragma once

#include "obscout/geometry.hpp"
#include "obscout/oracle.hpp"
#include "obscout/ray_search.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace obscout {

/// Columns are an orthonormal basis of R^d whose last column equals the
/// requested direction.
struct OrthonormalBasis {
    Mat columns;

    Vec transverse(int i) const { return columns.col(i); }
    Vec last() const { return columns.col(columns.cols() - 1); }
    int dim() const { return static_cast<int>(columns.cols()); }
};

inline OrthonormalBasis build_orthonormal_basis(const Direction& u, int dim) {
    if (u.dim() != dim) throw PreconditionError("build_orthonormal_basis: dimension mismatch");
    Mat cols(dim, dim);
    int have = 0;
    // Gram-Schmidt over the canonical basis, two passes for orthogonality.
    for (int k = 0; k < dim && have < dim - 1; ++k) {
        Vec v = Vec::Zero(dim);
        v[k] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            v -= u.vec() * u.vec().dot(v);
            for (int j = 0; j < have; ++j) v -= cols.col(j) * cols.col(j).dot(v);
        }
        const double n = v.norm();
        if (n > 1e-8) cols.col(have++) = v / n;
    }
    if (have != dim - 1) throw Error("build_orthonormal_basis: failed to complete basis");
    cols.col(dim - 1) = u.vec();
    return {cols};
}

struct FarthestResult {
    Point point;          // inside the obstacle
    double support_value; // <point, u>
    std::uint64_t queries_used = 0;
    int iterations = 0;   // completed coordinate sweeps
};

namespace detail {

// Maximizes a concave function over [a, b] by golden-section search.
// Terminates when the bracket is below tol_x or when a chord-slope upper
// bound certifies the best seen value is within tol_v of the maximum; the
// latter exits after a couple of probes on flat or gently curved sections.
template <typename F>
std::pair<double, double> golden_max(F&& g, double a, double b, double tol_x, double tol_v) {
    struct Eval {
        double t, v;
    };
    std::vector<Eval> evals;
    auto eval = [&](double t) {
        const double v = g(t);
        evals.insert(std::upper_bound(evals.begin(), evals.end(), t,
                                      [](double x, const Eval& e) { return x < e.t; }),
                     {t, v});
        return v;
    };

    auto upper_bound_gap = [&]() -> double {
        if (evals.size() < 3) return std::numeric_limits<double>::infinity();
        size_t m = 0;
        for (size_t i = 1; i < evals.size(); ++i)
            if (evals[i].v > evals[m].v) m = i;
        const double gm = evals[m].v;
        double bound = 0.0;
        if (m + 1 < evals.size()) {
            const double sl = (m > 0)
                                  ? (gm - evals[m - 1].v) / (evals[m].t - evals[m - 1].t)
                                  : std::numeric_limits<double>::infinity();
            const double span = evals[m + 1].t - evals[m].t;
            if (!std::isfinite(sl)) return std::numeric_limits<double>::infinity();
            bound = std::max(bound, std::max(0.0, sl) * span);
        } else {
            return std::numeric_limits<double>::infinity();
        }
        if (m > 0) {
            const double sr = (m + 1 < evals.size())
                                  ? (evals[m + 1].v - gm) / (evals[m + 1].t - evals[m].t)
                                  : -std::numeric_limits<double>::infinity();
            const double span = evals[m].t - evals[m - 1].t;
            if (!std::isfinite(sr)) return std::numeric_limits<double>::infinity();
            bound = std::max(bound, std::max(0.0, -sr) * span);
        } else {
            return std::numeric_limits<double>::infinity();
        }
        return bound;
    };

    constexpr double kPhi = 0.6180339887498949;
    double c = b - kPhi * (b - a);
    double d = a + kPhi * (b - a);
    double gc = eval(c);
    double gd = eval(d);
    while (b - a > tol_x) {
        if (upper_bound_gap() <= tol_v) break;
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - kPhi * (b - a);
            gc = eval(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + kPhi * (b - a);
            gd = eval(d);
        }
    }

    const auto best = std::max_element(evals.begin(), evals.end(),
                                       [](const Eval& x, const Eval& y) { return x.v < y.v; });
    return {best->t, best->v};
}

}  // namespace detail

/// Coordinate ascent for an eps-approximate extreme point of the implicit
/// convex body along u, starting from an inside point p. Each transverse
/// coordinate is line-maximized over the bracket located by ray searches at
/// tolerance eps/d; sweeps stop once a full pass improves the support value
/// by less than eps/2.
inline FarthestResult farthest(const MembershipOracle& oracle, double eps, const Direction& u,
                               const Point& p, double t_max, const RaySearchOptions& ray_opt = {}) {
    const int dim = oracle.dim();
    if (u.dim() != dim || p.size() != dim)
        throw PreconditionError("farthest: dimension mismatch");
    const double eps_ray = eps / dim;

    std::uint64_t queries = 1;
    if (!oracle.query(p)) throw PreconditionError("farthest: start point is not inside an obstacle");

    const OrthonormalBasis basis = build_orthonormal_basis(u, dim);
    Point q = p;

    const RaySearchResult first_lift = extreme_along_ray(oracle, q, u, eps_ray, t_max, ray_opt);
    queries += first_lift.queries_used;
    q += first_lift.t_inside * u.vec();
    double support = u.dot(q);

    std::vector<double> plus_hint(dim, 0.0), minus_hint(dim, 0.0);
    const int max_sweeps = 16 * dim;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        const double sweep_start = support;
        for (int i = 0; i < dim - 1; ++i) {
            const Vec axis = basis.transverse(i);
            const RaySearchResult plus =
                extreme_along_ray(oracle, q, Direction(axis), eps_ray, t_max, ray_opt, plus_hint[i]);
            const RaySearchResult minus =
                extreme_along_ray(oracle, q, Direction(-axis), eps_ray, t_max, ray_opt, minus_hint[i]);
            queries += plus.queries_used + minus.queries_used;
            plus_hint[i] = plus.t_inside;
            minus_hint[i] = minus.t_inside;
            const double lo = -minus.t_inside;
            const double hi = plus.t_inside;
            if (hi - lo <= eps_ray) continue;

            // Height of the fiber top through q + t*axis, relative to u.
            // Consecutive probes reuse the previous gain as a warm start.
            double gain_hint = 0.0;
            auto height = [&](double t) -> double {
                const Point base = q + t * axis;
                try {
                    const RaySearchResult r =
                        extreme_along_ray(oracle, base, u, eps_ray, t_max, ray_opt, gain_hint);
                    queries += r.queries_used;
                    gain_hint = r.t_inside;
                    return support + r.t_inside;
                } catch (const PreconditionError&) {
                    ++queries;  // bitmap pixelation can break convexity; skip
                    return -std::numeric_limits<double>::infinity();
                }
            };
            const auto [t_best, h_best] = detail::golden_max(height, lo, hi, eps_ray, eps_ray);
            if (h_best > support) {
                q += t_best * axis + (h_best - support) * u.vec();
                support = h_best;
                for (int k = 0; k < dim; ++k) {
                    plus_hint[k] = 0.0;
                    minus_hint[k] = 0.0;
                }
                plus_hint[i] = std::max(0.0, hi - t_best);
                minus_hint[i] = std::max(0.0, t_best - lo);
            }
        }
        if (dim == 1) break;
        if (support - sweep_start < eps / 2.0) {
            ++sweep;
            break;
        }
    }
    if (sweep >= max_sweeps)
        throw ConvergenceError("farthest: coordinate ascent hit the sweep cap", q,
                               support - u.dot(p));

    return {std::move(q), support, queries, std::max(sweep, 1)};
}

/// Directional width <P[u] - P[-u], u> of the obstacle containing seed,
/// via extreme-point searches in u and -u (each eps-accurate, so the result
/// carries at most 2*eps additive error).
inline double directional_width(const MembershipOracle& oracle, const Point& seed,
                                const Direction& u, double eps, double t_max,
                                const RaySearchOptions& ray_opt = {}) {
    const FarthestResult fwd = farthest(oracle, eps, u, seed, t_max, ray_opt);
    const FarthestResult bwd = farthest(oracle, eps, -u, seed, t_max, ray_opt);
    return fwd.support_value + bwd.support_value;
}

}  // namespace obscout
