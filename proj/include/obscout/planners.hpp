#pragma once

#include "obscout/freespace.hpp"
#include "obscout/geometry.hpp"
#include "obscout/mvee.hpp"
#include "obscout/oracle.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace obscout {

struct PlannerConfig {
    double step_size = 0.0;
    double goal_bias = 0.05;
    int max_iterations = 0;
    double goal_tolerance = 0.0;
    double rewire_radius_factor = 2.0;  // RRT* neighbourhood = factor * step_size
    double edge_resolution = 0.0;       // collision-check spacing along edges

    void validate() const {
        if (!(step_size > 0.0)) throw PreconditionError("PlannerConfig: step_size must be positive");
        if (!(goal_bias >= 0.0 && goal_bias < 1.0))
            throw PreconditionError("PlannerConfig: goal_bias must be in [0,1)");
        if (!(goal_tolerance > 0.0))
            throw PreconditionError("PlannerConfig: goal_tolerance must be positive");
        if (max_iterations < 1) throw PreconditionError("PlannerConfig: max_iterations must be >= 1");
        if (!(edge_resolution > 0.0))
            throw PreconditionError("PlannerConfig: edge_resolution must be positive");
    }
};

struct PlanResult {
    bool found = false;
    std::vector<Point> path;  // empty when no path was found
    double path_length = std::numeric_limits<double>::infinity();
    double wall_time_ms = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t samples_total = 0;
    std::uint64_t samples_wasted = 0;  // drawn samples that query true
};

/// Sampling source for the planners; vanilla uniform sampling and the
/// triangulation-backed sampler are interchangeable behind this interface.
class Sampler {
public:
    virtual ~Sampler() = default;
    virtual Point draw(std::mt19937_64& rng) = 0;
};

class UniformSampler final : public Sampler {
public:
    explicit UniformSampler(AABox bounds) : bounds_(std::move(bounds)) {}

    Point draw(std::mt19937_64& rng) override {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Point p(bounds_.dim());
        for (int i = 0; i < bounds_.dim(); ++i)
            p[i] = bounds_.lo[i] + unit(rng) * (bounds_.hi[i] - bounds_.lo[i]);
        return p;
    }

private:
    AABox bounds_;
};

/// Volume-proportional sampler over the triangulated free space. The space
/// may be mutated between draws (on-the-fly discovery); the cumulative table
/// refreshes itself via the free-space version counter.
class FreeSpaceSampler final : public Sampler {
public:
    explicit FreeSpaceSampler(const TriangulatedFreeSpace& fs) : fs_(&fs) {}

    Point draw(std::mt19937_64& rng) override {
        if (fs_->total_volume() <= 0.0 || fs_->regions().empty())
            throw FreeSpaceExhaustedError("FreeSpaceSampler: no free space left");
        if (version_ != fs_->version() || cum_.size() != fs_->regions().size()) {
            cum_.clear();
            cum_.reserve(fs_->regions().size());
            double acc = 0.0;
            for (const auto& r : fs_->regions()) {
                acc += r.volume;
                cum_.push_back(acc);
            }
            version_ = fs_->version();
        }
        std::uniform_real_distribution<double> unit(0.0, cum_.back());
        const double r = unit(rng);
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), r);
        const size_t idx = std::min(static_cast<size_t>(it - cum_.begin()), cum_.size() - 1);
        return sample_in_simplex(fs_->regions()[idx].simplex, rng);
    }

private:
    const TriangulatedFreeSpace* fs_;
    std::vector<double> cum_;
    std::uint64_t version_ = ~0ull;
};

namespace detail {

// Collision check along [a, b] with oracle queries every `resolution` units,
// endpoint included. Returns true when the edge stays free.
inline bool edge_free(const MembershipOracle& oracle, const Point& a, const Point& b,
                      double resolution) {
    const double len = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int i = 1; i <= steps; ++i) {
        const Point x = a + (static_cast<double>(i) / steps) * (b - a);
        if (oracle.query(x)) return false;
    }
    return true;
}

inline int nearest_node(const std::vector<Point>& nodes, const Point& x) {
    int best = 0;
    double best_d = (nodes[0] - x).squaredNorm();
    for (int i = 1; i < static_cast<int>(nodes.size()); ++i) {
        const double d = (nodes[i] - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline std::vector<Point> backtrack(const std::vector<Point>& nodes,
                                    const std::vector<int>& parent, int leaf) {
    std::vector<Point> path;
    for (int i = leaf; i >= 0; i = parent[i]) path.push_back(nodes[i]);
    std::reverse(path.begin(), path.end());
    return path;
}

inline double path_length_of(const std::vector<Point>& path) {
    double len = 0.0;
    for (size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
    return len;
}

}  // namespace detail

using ObstacleSampleHook = std::function<void(const Point&)>;

namespace detail {

inline PlanResult run_rrt(const MembershipOracle& oracle, Sampler& sampler, const Point& start,
                          const Point& goal, const PlannerConfig& cfg, std::uint64_t seed,
                          bool star, const ObstacleSampleHook& on_obstacle) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    if (oracle.query(start)) throw PreconditionError("rrt: start is inside an obstacle");
    if (oracle.query(goal)) throw PreconditionError("rrt: goal is inside an obstacle");

    PlanResult res;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Point> nodes{start};
    std::vector<int> parent{-1};
    std::vector<double> cost{0.0};

    auto finish = [&](int leaf) {
        res.found = true;
        res.path = detail::backtrack(nodes, parent, leaf);
        res.path_length = detail::path_length_of(res.path);
        res.wall_time_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        return res;
    };

    if ((goal - start).norm() <= cfg.goal_tolerance) return finish(0);

    const double rewire_radius = cfg.rewire_radius_factor * cfg.step_size;
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        res.iterations = iter;

        Point x_rand;
        if (unit(rng) < cfg.goal_bias) {
            x_rand = goal;
        } else {
            x_rand = sampler.draw(rng);
            ++res.samples_total;
            if (oracle.query(x_rand)) {
                ++res.samples_wasted;
                if (on_obstacle) on_obstacle(x_rand);
            }
        }

        const int near = detail::nearest_node(nodes, x_rand);
        const double dist = (x_rand - nodes[near]).norm();
        if (dist < 1e-12) continue;
        const Point x_new = (dist <= cfg.step_size)
                                ? x_rand
                                : Point(nodes[near] + (cfg.step_size / dist) * (x_rand - nodes[near]));

        int best_parent = near;
        if (!detail::edge_free(oracle, nodes[near], x_new, cfg.edge_resolution)) continue;
        double best_cost = cost[near] + (x_new - nodes[near]).norm();

        std::vector<int> neighbours;
        if (star) {
            for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
                if ((nodes[i] - x_new).norm() <= rewire_radius) neighbours.push_back(i);
            for (int i : neighbours) {
                const double c = cost[i] + (x_new - nodes[i]).norm();
                if (c < best_cost && detail::edge_free(oracle, nodes[i], x_new, cfg.edge_resolution)) {
                    best_cost = c;
                    best_parent = i;
                }
            }
        }

        nodes.push_back(x_new);
        parent.push_back(best_parent);
        cost.push_back(best_cost);
        const int new_idx = static_cast<int>(nodes.size()) - 1;

        if (star) {
            for (int i : neighbours) {
                const double through = best_cost + (nodes[i] - x_new).norm();
                if (through + 1e-12 < cost[i] &&
                    detail::edge_free(oracle, x_new, nodes[i], cfg.edge_resolution)) {
                    parent[i] = new_idx;
                    cost[i] = through;
                }
            }
        }

        if ((x_new - goal).norm() <= cfg.goal_tolerance) return finish(new_idx);
    }

    res.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace detail

inline PlanResult rrt(const MembershipOracle& oracle, Sampler& sampler, const Point& start,
                      const Point& goal, const PlannerConfig& cfg, std::uint64_t seed,
                      const ObstacleSampleHook& on_obstacle = {}) {
    return detail::run_rrt(oracle, sampler, start, goal, cfg, seed, false, on_obstacle);
}

inline PlanResult rrt_star(const MembershipOracle& oracle, Sampler& sampler, const Point& start,
                           const Point& goal, const PlannerConfig& cfg, std::uint64_t seed,
                           const ObstacleSampleHook& on_obstacle = {}) {
    return detail::run_rrt(oracle, sampler, start, goal, cfg, seed, true, on_obstacle);
}

// ---------------------------------------------------------------------------
// Preprocessing driver

struct Discovery {
    Point probe;
    CoresetPointSet coreset;
    Ellipsoid ellipsoid;
    CrossPolytope polytope;
    StepTrace trace;
};

struct PreprocessResult {
    TriangulatedFreeSpace freespace;
    std::vector<Discovery> discoveries;
    std::uint64_t probes_used = 0;
    std::uint64_t oracle_queries = 0;  // total spent, discovery included
    bool exhausted = false;
    std::vector<std::string> warnings;

    std::vector<CrossPolytope> polytopes() const {
        std::vector<CrossPolytope> out;
        out.reserve(discoveries.size());
        for (const auto& d : discoveries) out.push_back(d.polytope);
        return out;
    }
};

/// Discovers obstacles with stratified probe grids of halving spacing and
/// removes each discovered cross-polytope from the sampling space. Probes
/// falling inside an already-discovered polytope are skipped without an
/// oracle query; the schedule stops when the grid spacing drops below eps or
/// the probe budget runs out.
inline PreprocessResult preprocess(const MembershipOracle& oracle, const WorkspaceMeta& meta,
                                   std::uint64_t budget, const RaySearchOptions& ray_opt = {}) {
    meta.validate();
    if (budget < 1) throw PreconditionError("preprocess: budget must be >= 1");
    const auto stats0 = oracle.stats();

    PreprocessResult out{triangulate_bounds(meta.bounds)};
    const Vec ext = meta.bounds.extent();
    const double max_ext = ext.maxCoeff();

    bool out_of_budget = false;
    for (int level = 0; !out_of_budget; ++level) {
        const double spacing = max_ext / std::pow(2.0, level);
        if (spacing < meta.eps) break;

        std::vector<int> counts(meta.dim);
        long long total = 1;
        for (int i = 0; i < meta.dim; ++i) {
            counts[i] = std::max(1, static_cast<int>(std::ceil(ext[i] / spacing)));
            total *= counts[i];
        }

        for (long long flat = 0; flat < total && !out_of_budget; ++flat) {
            Point probe(meta.dim);
            long long rest = flat;
            for (int i = 0; i < meta.dim; ++i) {
                const int k = static_cast<int>(rest % counts[i]);
                rest /= counts[i];
                probe[i] = meta.bounds.lo[i] + (k + 0.5) * ext[i] / counts[i];
            }

            if (out.freespace.inside_removed(probe)) continue;
            if (out.probes_used >= budget) {
                out_of_budget = true;
                break;
            }
            ++out.probes_used;
            if (!oracle.query(probe)) continue;

            try {
                MveCoresetResult disc =
                    mve_coreset(oracle, meta.eps, probe, meta.ray_limit(), std::nullopt, ray_opt);
                CrossPolytope cp = cross_polytope_bound(disc.ellipsoid);
                out.freespace.remove_polytope(cp);
                out.discoveries.push_back({probe, std::move(disc.coreset), std::move(disc.ellipsoid),
                                           std::move(cp), std::move(disc.trace)});
            } catch (const FreeSpaceExhaustedError&) {
                out.exhausted = true;
                out.oracle_queries = oracle.stats().total_queries - stats0.total_queries;
                return out;
            } catch (const DegenerateObstacleError& e) {
                out.warnings.push_back(std::string("probe skipped: ") + e.what());
            }
        }
    }

    out.oracle_queries = oracle.stats().total_queries - stats0.total_queries;
    return out;
}

}  // namespace obscout
