#pragma once

#include "obscout/geometry.hpp"
#include "obscout/oracle.hpp"

#include <cstdint>

namespace obscout {

struct RaySearchResult {
    double t_inside = 0.0;   // last ray parameter with oracle true
    double t_outside = 0.0;  // first ray parameter with oracle false
    std::uint64_t queries_used = 0;
};

struct RaySearchOptions {
    double growth_base = 2.0;  // base of the exponential probe sequence
};

/// Locates the obstacle boundary along the ray p + t*u for t >= 0:
/// exponential probes at eps * base^k, then binary refinement until the
/// bracket is at most eps wide. The returned bracket is exact in the sense
/// that oracle(p + t_inside*u) was observed true and oracle(p + t_outside*u)
/// observed false. A positive t_hint warm-starts the probe sequence near a
/// previously observed boundary; it changes the query count, never the
/// bracket contract.
inline RaySearchResult extreme_along_ray(const MembershipOracle& oracle, const Point& p,
                                         const Direction& u, double eps, double t_max,
                                         const RaySearchOptions& opt = {}, double t_hint = 0.0) {
    if (!(eps > 0.0)) throw PreconditionError("extreme_along_ray: eps must be positive");
    if (!(t_max >= eps)) throw PreconditionError("extreme_along_ray: t_max must be >= eps");
    if (!(opt.growth_base > 1.0)) throw PreconditionError("extreme_along_ray: growth base must exceed 1");

    std::uint64_t queries = 1;
    if (!oracle.query(p))
        throw PreconditionError("extreme_along_ray: start point is not inside an obstacle");

    double t_in = 0.0;
    double t_out = -1.0;
    double t = eps;
    if (t_hint > eps && t_hint < t_max) {
        ++queries;
        if (oracle.query(p + t_hint * u.vec())) {
            t_in = t_hint;
            t = t_hint * opt.growth_base;
        } else {
            t_out = t_hint;
        }
    }
    while (t_out < 0.0) {
        const bool capped = t >= t_max;
        if (capped) t = t_max;
        ++queries;
        if (!oracle.query(p + t * u.vec())) {
            t_out = t;
            break;
        }
        t_in = t;
        if (capped)
            throw UnboundedObstacleError("extreme_along_ray: obstacle extends past t_max");
        t *= opt.growth_base;
    }

    while (t_out - t_in > eps) {
        const double mid = 0.5 * (t_in + t_out);
        ++queries;
        if (oracle.query(p + mid * u.vec()))
            t_in = mid;
        else
            t_out = mid;
    }

    return {t_in, t_out, queries};
}

}  // namespace obscout
