#include "obscout/bench.hpp"
#include "obscout/scenario.hpp"
#include "obscout/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace obscout;

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
    bool dump_obstacles = false;
    bool dump_triangulation = false;
    bool on_the_fly = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--seed", args.seed, "Override the scenario seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--jobs", args.jobs, "Worker threads (0 = hardware)");
    cmd->add_flag("--dump-obstacles", args.dump_obstacles, "Write discovered ellipsoids/polytopes");
    cmd->add_flag("--dump-triangulation", args.dump_triangulation, "Write free-space regions");
    cmd->add_flag("--on-the-fly", args.on_the_fly, "Discover obstacles during planning");
}

Scenario load_scenario(const CommonArgs& args) {
    Scenario sc = Scenario::load(args.scenario_path);
    if (args.seed_set) sc.seed = args.seed;
    return sc;
}

void dump_discoveries(const PreprocessResult& pre, const std::string& out_dir) {
    Json obstacles = Json::array();
    for (const auto& d : pre.discoveries) {
        Json o;
        o["probe"] = std::vector<double>(d.probe.data(), d.probe.data() + d.probe.size());
        o["ellipsoid"] = to_json(d.ellipsoid);
        o["cross_polytope"] = to_json(d.polytope);
        Json coreset = Json::array();
        for (const auto& p : d.coreset.points)
            coreset.push_back(std::vector<double>(p.data(), p.data() + p.size()));
        o["coreset"] = coreset;
        o["converged"] = d.trace.converged;
        o["final_epsilon"] = d.trace.final_epsilon;
        obstacles.push_back(std::move(o));
    }
    std::ofstream out(out_dir + "/obstacles.json");
    out << obstacles.dump(2) << "\n";
}

int cmd_preprocess(const CommonArgs& args) {
    const Scenario sc = load_scenario(args);
    auto oracle = sc.make_oracle();
    const PreprocessResult pre = preprocess(*oracle, sc.meta, sc.preprocess_budget, sc.ray);

    std::filesystem::create_directories(args.out_dir);
    Json j;
    j["scenario"] = sc.name;
    j["probes"] = pre.probes_used;
    j["oracle_queries"] = pre.oracle_queries;
    j["polytopes"] = pre.discoveries.size();
    j["free_volume"] = pre.freespace.total_volume();
    j["bounds_volume"] = sc.meta.bounds.volume();
    j["free_volume_loss"] = sc.meta.bounds.volume() - pre.freespace.total_volume();
    j["exhausted"] = pre.exhausted;
    j["warnings"] = pre.warnings;
    std::ofstream out(args.out_dir + "/preprocess.json");
    out << j.dump(2) << "\n";

    if (args.dump_obstacles) dump_discoveries(pre, args.out_dir);
    if (args.dump_triangulation) {
        std::ofstream tri(args.out_dir + "/triangulation.json");
        tri << triangulation_to_json(pre.freespace).dump(2) << "\n";
    }
    if (sc.meta.dim == 2) render_map_svg(sc, &pre, args.out_dir + "/map.svg");

    std::cout << "preprocess: " << pre.discoveries.size() << " obstacle(s), "
              << pre.oracle_queries << " oracle queries, free volume "
              << pre.freespace.total_volume() << " / " << sc.meta.bounds.volume() << "\n";
    return 0;
}

int cmd_plan(const CommonArgs& args) {
    Scenario sc = load_scenario(args);
    auto oracle = sc.make_oracle();

    std::optional<PreprocessResult> pre;
    if (!args.on_the_fly) pre.emplace(preprocess(*oracle, sc.meta, sc.preprocess_budget, sc.ray));

    std::filesystem::create_directories(args.out_dir);
    Json results = Json::array();
    for (const auto& name : sc.planners) {
        PlanResult res;
        if (args.on_the_fly) {
            TriangulatedFreeSpace fs = triangulate_bounds(sc.meta.bounds);
            FreeSpaceSampler sampler(fs);
            ObstacleSampleHook hook = [&](const Point& x) {
                if (fs.inside_removed(x)) return;
                try {
                    auto disc = mve_coreset(*oracle, sc.meta.eps, x, sc.meta.ray_limit(),
                                            std::nullopt, sc.ray);
                    fs.remove_polytope(cross_polytope_bound(disc.ellipsoid));
                } catch (const Error&) {
                }
            };
            res = detail::run_named_planner(name, *oracle, sampler, sc, sc.seed, hook);
        } else {
            FreeSpaceSampler sampler(pre->freespace);
            res = detail::run_named_planner(name, *oracle, sampler, sc, sc.seed, {});
        }

        Json r;
        r["planner"] = name;
        r["found"] = res.found;
        r["path_length"] = res.path_length;
        r["iterations"] = res.iterations;
        r["samples_total"] = res.samples_total;
        r["samples_wasted"] = res.samples_wasted;
        r["time_ms"] = res.wall_time_ms;
        Json path = Json::array();
        for (const auto& p : res.path)
            path.push_back(std::vector<double>(p.data(), p.data() + p.size()));
        r["path"] = path;
        results.push_back(std::move(r));

        if (sc.meta.dim == 2)
            render_tree_svg(sc, res.path, args.out_dir + "/plan_" + name + ".svg");
        std::cout << name << ": " << (res.found ? "path found" : "no path") << ", length "
                  << res.path_length << ", iterations " << res.iterations << "\n";
    }
    std::ofstream out(args.out_dir + "/plan.json");
    out << results.dump(2) << "\n";

    if (pre && args.dump_obstacles) dump_discoveries(*pre, args.out_dir);
    if (pre && args.dump_triangulation) {
        std::ofstream tri(args.out_dir + "/triangulation.json");
        tri << triangulation_to_json(pre->freespace).dump(2) << "\n";
    }
    return 0;
}

int cmd_bench(const CommonArgs& args) {
    const Scenario sc = load_scenario(args);
    const ExperimentReport report = run_benchmark(sc, args.jobs, args.on_the_fly);
    write_report(report, args.out_dir);

    if ((args.dump_obstacles || args.dump_triangulation) && !args.on_the_fly) {
        auto oracle = sc.make_oracle();
        const PreprocessResult pre = preprocess(*oracle, sc.meta, sc.preprocess_budget, sc.ray);
        if (args.dump_obstacles) dump_discoveries(pre, args.out_dir);
        if (args.dump_triangulation) {
            std::ofstream tri(args.out_dir + "/triangulation.json");
            tri << triangulation_to_json(pre.freespace).dump(2) << "\n";
        }
        if (sc.meta.dim == 2) render_map_svg(sc, &pre, args.out_dir + "/map.svg");
    }

    std::cout << "bench: " << report.rows.size() << " rows -> " << args.out_dir
              << "/results.csv\n";
    for (const auto& g : report.aggregates)
        std::cout << "  " << g["planner"].get<std::string>() << "/"
                  << g["sampler"].get<std::string>() << ": success "
                  << g["success_rate"].get<double>() << ", median-free wasted% mean "
                  << g["wasted_pct"]["mean"].get<double>() << ", path mean "
                  << g["path_length"]["mean"].get<double>() << "\n";
    return 0;
}

int cmd_mvee_curve(const CommonArgs& args) {
    const Scenario sc = load_scenario(args);
    if (sc.shapes.empty())
        throw PreconditionError("mvee-curve: scenario must provide an analytic shape");
    const MveeCurve curve = run_mvee_curve(sc.shapes.front(), sc.meta.eps);
    write_mvee_curve(curve, args.out_dir);
    std::cout << "mvee-curve: " << curve.series.size() << " points, final error "
              << curve.final_error << " (eps " << sc.meta.eps << ")\n";
    return 0;
}

int cmd_map_approx(const CommonArgs& args) {
    const Scenario sc = load_scenario(args);
    const MapApproxResult res = run_map_approx(sc);
    write_map_approx(res, args.out_dir);
    for (const auto& e : res.table)
        std::cout << e.algorithm << ": " << e.queries << " queries, agreement " << e.agreement
                  << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"obscout: membership-oracle obstacle discovery and informed sampling for RRT planners"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs&) = nullptr;

    auto* pre = app.add_subcommand("preprocess", "Discover obstacles and triangulate free space");
    add_common(pre, args);
    pre->callback([&] { handler = cmd_preprocess; });

    auto* plan = app.add_subcommand("plan", "Run each planner once and write the path");
    add_common(plan, args);
    plan->callback([&] { handler = cmd_plan; });

    auto* bench = app.add_subcommand("bench", "Run the full trial matrix and write CSV/JSON");
    add_common(bench, args);
    bench->callback([&] { handler = cmd_bench; });

    auto* curve = app.add_subcommand("mvee-curve", "Volume-error-vs-iteration series for a shape");
    add_common(curve, args);
    curve->callback([&] { handler = cmd_mvee_curve; });

    auto* mapx = app.add_subcommand("map-approx", "Exploration/coverage comparison on a bitmap");
    add_common(mapx, args);
    mapx->callback([&] { handler = cmd_map_approx; });

    CLI11_PARSE(app, argc, argv);

    try {
        return handler(args);
    } catch (const obscout::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
}
