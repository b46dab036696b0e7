#pragma once

#include "obscout/freespace.hpp"
#include "obscout/planners.hpp"
#include "obscout/scenario.hpp"
#include "obscout/serialize.hpp"
#include "obscout/svg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace obscout {

// ---------------------------------------------------------------------------
// Result rows and aggregates

struct PlanRow {
    std::string map;
    std::string planner;
    std::string sampler;
    std::uint64_t seed = 0;
    double time_ms = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t samples_total = 0;
    std::uint64_t samples_wasted = 0;
    double path_length = std::numeric_limits<double>::infinity();
    bool found = false;
};

inline std::string csv_header() {
    return "map,planner,sampler,seed,time_ms,iterations,samples_total,samples_wasted,"
           "path_length,found";
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Summary {
    double mean = 0.0, stddev = 0.0;
    double min = 0.0, max = 0.0;
    size_t n = 0;
};

inline Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    s.min = *std::min_element(xs.begin(), xs.end());
    s.max = *std::max_element(xs.begin(), xs.end());
    for (double x : xs) s.mean += x;
    s.mean /= xs.size();
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / (xs.size() - 1));
    }
    return s;
}

inline Json summary_json(const Summary& s) {
    return {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}, {"n", s.n}};
}

}  // namespace detail

inline std::string to_csv(const PlanRow& r) {
    std::string out;
    out += r.map + "," + r.planner + "," + r.sampler + "," + std::to_string(r.seed) + ",";
    out += detail::fmt_double(r.time_ms) + ",";
    out += std::to_string(r.iterations) + "," + std::to_string(r.samples_total) + "," +
           std::to_string(r.samples_wasted) + ",";
    out += detail::fmt_double(r.path_length) + ",";
    out += r.found ? "1" : "0";
    return out;
}

/// Per-(planner, sampler) aggregates, recomputable from the rows exactly.
inline Json aggregate_rows(const std::vector<PlanRow>& rows) {
    std::vector<std::pair<std::string, std::string>> groups;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.planner, r.sampler);
        if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    }
    Json out = Json::array();
    for (const auto& [planner, sampler] : groups) {
        std::vector<double> time, iters, wasted_pct, lengths;
        size_t n = 0, found = 0;
        for (const auto& r : rows) {
            if (r.planner != planner || r.sampler != sampler) continue;
            ++n;
            time.push_back(r.time_ms);
            iters.push_back(static_cast<double>(r.iterations));
            wasted_pct.push_back(r.samples_total
                                     ? 100.0 * static_cast<double>(r.samples_wasted) /
                                           static_cast<double>(r.samples_total)
                                     : 0.0);
            if (r.found) {
                ++found;
                lengths.push_back(r.path_length);
            }
        }
        Json g;
        g["planner"] = planner;
        g["sampler"] = sampler;
        g["trials"] = n;
        g["success_rate"] = n ? static_cast<double>(found) / static_cast<double>(n) : 0.0;
        g["time_ms"] = detail::summary_json(detail::summarize(time));
        g["iterations"] = detail::summary_json(detail::summarize(iters));
        g["wasted_pct"] = detail::summary_json(detail::summarize(wasted_pct));
        g["path_length"] = detail::summary_json(detail::summarize(lengths));
        out.push_back(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Benchmark driver

struct ExperimentReport {
    std::string scenario_name;
    std::vector<PlanRow> rows;
    Json aggregates;
    Json preprocess_stats;
};

namespace detail {

inline PlanResult run_named_planner(const std::string& name, const MembershipOracle& oracle,
                                    Sampler& sampler, const Scenario& sc, std::uint64_t seed,
                                    const ObstacleSampleHook& hook) {
    if (name == "rrt") return rrt(oracle, sampler, sc.start, sc.goal, sc.planner, seed, hook);
    if (name == "rrt_star")
        return rrt_star(oracle, sampler, sc.start, sc.goal, sc.planner, seed, hook);
    throw PreconditionError("unknown planner '" + name + "'");
}

}  // namespace detail

/// Runs planner x {vanilla, ours} x trial. "Ours" samples from the
/// triangulated free space after one shared preprocessing pass, or performs
/// on-the-fly discovery per trial when requested. Trials run on a worker
/// pool; row order is fixed by task index, not thread timing.
inline ExperimentReport run_benchmark(const Scenario& sc, int jobs = 0, bool on_the_fly = false) {
    auto oracle = sc.make_oracle();
    ExperimentReport report;
    report.scenario_name = sc.name;

    std::optional<PreprocessResult> pre;
    if (!on_the_fly) {
        pre.emplace(preprocess(*oracle, sc.meta, sc.preprocess_budget, sc.ray));
        report.preprocess_stats = {
            {"probes", pre->probes_used},
            {"oracle_queries", pre->oracle_queries},
            {"polytopes", pre->discoveries.size()},
            {"free_volume", pre->freespace.total_volume()},
            {"bounds_volume", sc.meta.bounds.volume()},
            {"free_volume_loss",
             sc.meta.bounds.volume() - pre->freespace.total_volume()},
            {"warnings", pre->warnings}};
    } else {
        report.preprocess_stats = {{"mode", "on_the_fly"}};
    }

    struct Task {
        std::string planner;
        std::string sampler;
        int trial;
    };
    std::vector<Task> tasks;
    for (const auto& pl : sc.planners)
        for (const std::string& sam : {std::string("vanilla"), std::string("ours")})
            for (int t = 0; t < sc.trials; ++t) tasks.push_back({pl, sam, t});

    report.rows.resize(tasks.size());
    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::vector<std::string> errors;

    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            const Task& task = tasks[i];
            const std::uint64_t seed = sc.seed + static_cast<std::uint64_t>(task.trial);

            PlanRow row;
            row.map = sc.name;
            row.planner = task.planner;
            row.sampler = task.sampler;
            row.seed = seed;
            try {
                PlanResult res;
                if (task.sampler == "vanilla") {
                    UniformSampler sampler(sc.meta.bounds);
                    res = detail::run_named_planner(task.planner, *oracle, sampler, sc, seed, {});
                } else if (!on_the_fly) {
                    FreeSpaceSampler sampler(pre->freespace);
                    res = detail::run_named_planner(task.planner, *oracle, sampler, sc, seed, {});
                } else {
                    TriangulatedFreeSpace fs = triangulate_bounds(sc.meta.bounds);
                    FreeSpaceSampler sampler(fs);
                    ObstacleSampleHook hook = [&](const Point& x) {
                        if (fs.inside_removed(x)) return;
                        try {
                            MveCoresetResult disc =
                                mve_coreset(*oracle, sc.meta.eps, x, sc.meta.ray_limit(),
                                            std::nullopt, sc.ray);
                            fs.remove_polytope(cross_polytope_bound(disc.ellipsoid));
                        } catch (const Error&) {
                            // discovery failures leave the sample merely wasted
                        }
                    };
                    res = detail::run_named_planner(task.planner, *oracle, sampler, sc, seed, hook);
                }
                row.time_ms = res.wall_time_ms;
                row.iterations = res.iterations;
                row.samples_total = res.samples_total;
                row.samples_wasted = res.samples_wasted;
                row.path_length = res.path_length;
                row.found = res.found;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                errors.push_back(task.planner + "/" + task.sampler + "#" +
                                 std::to_string(task.trial) + ": " + e.what());
            }
            report.rows[i] = std::move(row);
        }
    };

    int n_threads = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    report.aggregates = aggregate_rows(report.rows);
    if (!errors.empty()) report.preprocess_stats["trial_errors"] = errors;
    return report;
}

inline void write_report(const ExperimentReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir + "/results.csv");
    csv << csv_header() << "\n";
    for (const auto& r : report.rows) csv << to_csv(r) << "\n";

    Json j;
    j["scenario"] = report.scenario_name;
    j["preprocess"] = report.preprocess_stats;
    j["aggregates"] = report.aggregates;
    std::ofstream agg(out_dir + "/aggregates.json");
    agg << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// MVEE error curve

struct MveeCurve {
    std::vector<std::pair<int, double>> series;  // (iteration, |vol/vol* - 1|)
    double true_volume = 0.0;
    double final_error = 0.0;
    CoresetPointSet coreset;
};

namespace detail {

inline std::vector<Point> dense_boundary_2d(const ConvexShape& shape, int n) {
    std::vector<Point> out;
    if (const auto* ball = std::get_if<BallShape>(&shape)) {
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * std::numbers::pi * k / n;
            Point p(2);
            p << ball->center[0] + ball->radius * std::cos(th),
                ball->center[1] + ball->radius * std::sin(th);
            out.push_back(p);
        }
    } else if (const auto* box = std::get_if<BoxShape>(&shape)) {
        const Vec ext = box->box.extent();
        for (int k = 0; k < n; ++k) {
            const double t = 4.0 * k / n;
            Point p = box->box.lo;
            if (t < 1.0) {
                p[0] += t * ext[0];
            } else if (t < 2.0) {
                p[0] += ext[0];
                p[1] += (t - 1.0) * ext[1];
            } else if (t < 3.0) {
                p[0] += (3.0 - t) * ext[0];
                p[1] += ext[1];
            } else {
                p[1] += (4.0 - t) * ext[1];
            }
            out.push_back(p);
        }
    } else if (const auto* ell = std::get_if<EllipsoidShape>(&shape)) {
        Eigen::SelfAdjointEigenSolver<Mat> es(ell->shape);
        const Mat axes = es.eigenvectors();
        const Vec semi = es.eigenvalues().array().rsqrt();
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * std::numbers::pi * k / n;
            out.push_back(ell->center + axes.col(0) * semi[0] * std::cos(th) +
                          axes.col(1) * semi[1] * std::sin(th));
        }
    } else if (const auto* poly = std::get_if<PolytopeShape>(&shape)) {
        const auto& v = poly->vertices;
        const int per_edge = std::max(1, n / static_cast<int>(v.size()));
        for (size_t i = 0; i < v.size(); ++i) {
            const Point& a = v[i];
            const Point& b = v[(i + 1) % v.size()];
            for (int k = 0; k < per_edge; ++k)
                out.push_back(a + (static_cast<double>(k) / per_edge) * (b - a));
        }
    }
    return out;
}

inline AABox shape_bbox_2d(const ConvexShape& shape, double margin) {
    std::vector<Point> probe = dense_boundary_2d(shape, 256);
    Vec lo = probe[0], hi = probe[0];
    for (const auto& p : probe) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec pad = Vec::Constant(2, margin);
    return {lo - pad, hi + pad};
}

}  // namespace detail

/// Tracks the relative volume error of the trial ellipsoid against the
/// brute-force MVEE of a dense boundary sample, one point per iteration,
/// ending with the exact finite-set MVEE of the produced coreset.
inline MveeCurve run_mvee_curve(const ConvexShape& shape, double eps) {
    const AABox bounds = detail::shape_bbox_2d(shape, 1.0);
    const double diag = bounds.extent().norm();
    WorkspaceMeta meta{2, bounds, eps, eps, diag};

    auto oracle = make_analytic_oracle({shape}, meta);
    Point seed(2);
    // A boundary-sample centroid is inside by convexity.
    const auto dense = detail::dense_boundary_2d(shape, 2048);
    seed = Point::Zero(2);
    for (const auto& p : dense) seed += p;
    seed /= static_cast<double>(dense.size());

    MveeCurve curve;
    curve.true_volume = mvee_of_points(dense, 1e-9).volume();
    const MveCoresetResult result = mve_coreset(*oracle, eps, seed, meta.ray_limit());
    curve.coreset = result.coreset;

    int it = 0;
    for (const auto& row : result.trace.rows) {
        const double vol = StepTrace::volume_from_log_det(row.log_det, 2);
        curve.series.emplace_back(it++, std::abs(vol / curve.true_volume - 1.0));
    }
    const double final_vol = mvee_of_points(curve.coreset.points, 1e-7).volume();
    curve.series.emplace_back(it, std::abs(final_vol / curve.true_volume - 1.0));
    curve.final_error = curve.series.back().second;
    return curve;
}

inline void write_mvee_curve(const MveeCurve& curve, const std::string& out_dir,
                             const std::string& tag = "mvee_curve") {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir + "/" + tag + ".csv");
    csv << "iteration,relative_volume_error\n";
    for (const auto& [it, err] : curve.series)
        csv << it << "," << detail::fmt_double(err) << "\n";

    const double max_err = std::max(1e-12, curve.series.front().second);
    AABox plot{Vec::Zero(2), Vec::Constant(2, 1.0)};
    plot.hi[0] = std::max<double>(1.0, static_cast<double>(curve.series.size() - 1));
    SvgWriter svg(plot, 420.0 / plot.hi[0]);
    std::vector<Point> pts;
    for (const auto& [it, err] : curve.series) {
        Point p(2);
        p << static_cast<double>(it), err / max_err;
        pts.push_back(p);
    }
    svg.polyline(pts, "crimson", 1.5);
    svg.save(out_dir + "/" + tag + ".svg");
}

// ---------------------------------------------------------------------------
// Map approximation experiment

namespace detail {

inline std::vector<Point> convex_hull_2d(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) {
                              return a[0] == b[0] && a[1] == b[1];
                          }),
              pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Point> hull(2 * pts.size());
    size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;  // CCW
}

// Signed-distance membership in a CCW convex hull, with outward slack.
inline bool in_hull_2d(const std::vector<Point>& hull, const Point& p, double slack) {
    if (hull.size() < 3) return false;
    for (size_t i = 0; i < hull.size(); ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % hull.size()];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double len = std::hypot(ex, ey);
        if (len < 1e-15) continue;
        const double cross = ex * (p[1] - a[1]) - ey * (p[0] - a[0]);
        if (cross < -slack * len) return false;
    }
    return true;
}

// Membership oracle wrapper that records the pixel class of every query.
class RecordingOracle final : public MembershipOracle {
public:
    RecordingOracle(const BitmapOracle& inner)
        : MembershipOracle(inner.dim()), inner_(inner),
          seen_(static_cast<size_t>(inner.image().width) * inner.image().height, 0) {}

    // 0 unknown, 1 seen-free, 2 seen-obstacle
    const std::vector<std::uint8_t>& seen() const { return seen_; }

protected:
    bool contains(const Point& p) const override {
        const bool hit = inner_.query(p);
        if (inner_.bounds().contains(p)) {
            const auto [col, row] = inner_.pixel_of(p);
            seen_[static_cast<size_t>(row) * inner_.image().width + col] = hit ? 2 : 1;
        }
        return hit;
    }

private:
    const BitmapOracle& inner_;
    mutable std::vector<std::uint8_t> seen_;
};

}  // namespace detail

struct MapApproxEntry {
    std::string algorithm;
    std::uint64_t queries = 0;
    double agreement = 0.0;  // correctly-classified pixel fraction
};

struct MapApproxResult {
    std::vector<MapApproxEntry> table;
    GrayImage ours_map;
    GrayImage rrt_map;
    GrayImage bfs_map;
    std::uint64_t ours_queries = 0;
    double ours_agreement = 0.0;
    std::uint64_t pixel_count = 0;
};

/// Compares three exploration strategies on a bitmap scenario: breadth-first
/// pixel sweep, RRT-style exploration, and the discovery preprocessor whose
/// obstacle knowledge is the convex hull of each discovered coreset (dilated
/// by eps/2 to split the ray-search bracket).
inline MapApproxResult run_map_approx(const Scenario& sc) {
    if (!sc.bitmap) throw PreconditionError("run_map_approx: scenario must use a bitmap map");
    const GrayImage truth_img = read_pgm(sc.bitmap_path);
    const int w = truth_img.width, h = truth_img.height;
    const size_t n_pix = static_cast<size_t>(w) * h;
    std::vector<bool> truth(n_pix);
    for (size_t i = 0; i < n_pix; ++i)
        truth[i] = truth_img.pixels[i] <= sc.bitmap_threshold;

    const double cell_x = sc.meta.bounds.extent()[0] / w;
    const double cell_y = sc.meta.bounds.extent()[1] / h;
    auto pixel_center = [&](int col, int row) {
        Point p(2);
        p << sc.meta.bounds.lo[0] + (col + 0.5) * cell_x,
            sc.meta.bounds.lo[1] + (h - row - 0.5) * cell_y;
        return p;
    };
    auto agreement_of = [&](const std::vector<std::uint8_t>& cls) {
        size_t ok = 0;
        for (size_t i = 0; i < n_pix; ++i) {
            if (cls[i] == 0) continue;  // unknown counts as wrong
            if ((cls[i] == 2) == truth[i]) ++ok;
        }
        return static_cast<double>(ok) / static_cast<double>(n_pix);
    };
    auto to_image = [&](const std::vector<std::uint8_t>& cls) {
        GrayImage img;
        img.width = w;
        img.height = h;
        img.pixels.resize(n_pix);
        for (size_t i = 0; i < n_pix; ++i)
            img.pixels[i] = cls[i] == 2 ? 0 : (cls[i] == 1 ? 255 : 128);
        return img;
    };

    MapApproxResult out;
    out.pixel_count = n_pix;

    // --- ours: discovery preprocessing, knowledge = dilated coreset hulls
    BitmapOracle oracle(truth_img, sc.bitmap_threshold, sc.meta);
    const auto stats0 = oracle.stats();
    const PreprocessResult pre = preprocess(oracle, sc.meta, sc.preprocess_budget, sc.ray);

    // The MVEE coreset pins the enclosing ellipsoid, not the hull: a disk is
    // covered by 4 extreme points. Densify each discovered boundary with
    // hinted ray probes (hint = the Mahalanobis-1 radius) so the hull tracks
    // smooth obstacles too; the extra queries are charged to the budget.
    std::vector<std::vector<Point>> hulls;
    for (const auto& d : pre.discoveries) {
        std::vector<Point> pts = d.coreset.points;
        const Point c = d.ellipsoid.center();
        const int k_rays = 24;
        for (int k = 0; k < k_rays; ++k) {
            const double th = 2.0 * std::numbers::pi * k / k_rays;
            Vec u(2);
            u << std::cos(th), std::sin(th);
            const double hint = 1.0 / (d.ellipsoid.factor() * u).norm();
            try {
                const auto r = extreme_along_ray(oracle, c, Direction(u), sc.meta.eps,
                                                 sc.meta.ray_limit(), sc.ray, hint);
                pts.push_back(c + r.t_inside * u);
            } catch (const Error&) {
                // center off the bitmap obstacle or ray capped; skip the probe
            }
        }
        hulls.push_back(detail::convex_hull_2d(pts));
    }
    out.ours_queries = oracle.stats().total_queries - stats0.total_queries;
    std::vector<std::uint8_t> ours_cls(n_pix, 1);
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) {
            const Point p = pixel_center(col, row);
            for (const auto& hull : hulls)
                if (detail::in_hull_2d(hull, p, sc.meta.eps / 2.0)) {
                    ours_cls[static_cast<size_t>(row) * w + col] = 2;
                    break;
                }
        }
    out.ours_agreement = agreement_of(ours_cls);
    out.ours_map = to_image(ours_cls);
    out.table.push_back({"ours", out.ours_queries, out.ours_agreement});

    const std::uint64_t budget = out.ours_queries;

    // --- breadth-first pixel frontier from the lower-left corner
    {
        std::vector<std::uint8_t> cls(n_pix, 0);
        std::vector<std::uint8_t> visited(n_pix, 0);
        std::vector<std::pair<int, int>> queue{{0, h - 1}};
        visited[static_cast<size_t>(h - 1) * w] = 1;
        std::uint64_t queries = 0;
        size_t head = 0;
        const std::vector<std::uint64_t> checkpoints{5000, 10000, budget};
        size_t next_cp = 0;
        while (head < queue.size() && queries < budget) {
            auto [col, row] = queue[head++];
            const size_t idx = static_cast<size_t>(row) * w + col;
            ++queries;
            cls[idx] = truth[idx] ? 2 : 1;
            while (next_cp < checkpoints.size() && queries >= checkpoints[next_cp]) {
                if (checkpoints[next_cp] < budget)
                    out.table.push_back({"bfs@" + std::to_string(checkpoints[next_cp]),
                                         checkpoints[next_cp], agreement_of(cls)});
                ++next_cp;
            }
            if (truth[idx]) continue;  // frontier stops at obstacles
            const int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int c2 = col + dc[k], r2 = row + dr[k];
                if (c2 < 0 || c2 >= w || r2 < 0 || r2 >= h) continue;
                const size_t i2 = static_cast<size_t>(r2) * w + c2;
                if (!visited[i2]) {
                    visited[i2] = 1;
                    queue.emplace_back(c2, r2);
                }
            }
        }
        out.table.push_back({"bfs", queries, agreement_of(cls)});
        out.bfs_map = to_image(cls);
    }

    // --- RRT-style exploration from the map center at the same query budget
    {
        detail::RecordingOracle rec(oracle);
        std::mt19937_64 rng(sc.seed);
        UniformSampler sampler(sc.meta.bounds);
        std::vector<Point> nodes{sc.meta.bounds.center()};
        const double step = sc.planner.step_size;
        while (rec.stats().total_queries < budget) {
            const Point x_rand = sampler.draw(rng);
            const int near = detail::nearest_node(nodes, x_rand);
            const double dist = (x_rand - nodes[near]).norm();
            if (dist < 1e-12) continue;
            const Point x_new =
                (dist <= step) ? x_rand : Point(nodes[near] + (step / dist) * (x_rand - nodes[near]));
            if (detail::edge_free(rec, nodes[near], x_new, sc.planner.edge_resolution))
                nodes.push_back(x_new);
        }
        out.rrt_map = to_image(rec.seen());
        out.table.push_back({"rrt", rec.stats().total_queries, agreement_of(rec.seen())});
    }

    return out;
}

inline void write_map_approx(const MapApproxResult& res, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_pgm(out_dir + "/reconstructed.pgm", res.ours_map);
    write_pgm(out_dir + "/reconstructed_rrt.pgm", res.rrt_map);
    write_pgm(out_dir + "/reconstructed_bfs.pgm", res.bfs_map);
    std::ofstream csv(out_dir + "/map_approx.csv");
    csv << "algorithm,queries,agreement\n";
    for (const auto& e : res.table)
        csv << e.algorithm << "," << e.queries << "," << detail::fmt_double(e.agreement) << "\n";
}

// ---------------------------------------------------------------------------
// Rendering helpers for the CLI

inline void render_map_svg(const Scenario& sc, const PreprocessResult* pre,
                           const std::string& path) {
    SvgWriter svg(sc.meta.bounds);
    for (const auto& shape : sc.shapes) {
        const auto boundary = detail::dense_boundary_2d(shape, 128);
        if (!boundary.empty()) svg.polygon(boundary, "#9ecae1", "none");
    }
    if (pre) {
        for (const auto& r : pre->freespace.regions()) svg.polygon(r.simplex, "none", "#cccccc", 0.5);
        for (const auto& d : pre->discoveries) {
            std::vector<Point> quad = detail::convex_hull_2d(d.polytope.vertices);
            svg.polygon(quad, "none", "crimson", 1.2);
        }
    }
    svg.save(path);
}

inline void render_tree_svg(const Scenario& sc, const std::vector<Point>& path_points,
                            const std::string& path) {
    SvgWriter svg(sc.meta.bounds);
    for (const auto& shape : sc.shapes) {
        const auto boundary = detail::dense_boundary_2d(shape, 128);
        if (!boundary.empty()) svg.polygon(boundary, "#9ecae1", "none");
    }
    if (!path_points.empty()) svg.polyline(path_points, "darkgreen", 1.5);
    svg.circle(sc.start, 0.8, "blue");
    svg.circle(sc.goal, 0.8, "red");
    svg.save(path);
}

}  // namespace obscout
