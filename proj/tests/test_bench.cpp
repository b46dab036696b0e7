#include "obscout/bench.hpp"
#include "obscout/scenario.hpp"
#include "obscout/serialize.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <regex>

using namespace obscout;
using namespace testsupport;

namespace {

nlohmann::json small_scenario_json() {
    return nlohmann::json::parse(R"({
        "name": "toy",
        "bounds": {"lo": [0, 0], "hi": [10, 10]},
        "eps": 0.1,
        "inradius_lb": 1.0,
        "circumradius_ub": 3.0,
        "map": {"type": "analytic", "shapes": [
            {"type": "ball", "center": [5, 5], "radius": 1.8}
        ]},
        "start": [0.5, 0.5],
        "goal": [9.5, 9.5],
        "planners": ["rrt", "rrt_star"],
        "trials": 3,
        "seed": 9,
        "preprocess_budget": 400,
        "planner": {
            "step_size": 0.8,
            "goal_bias": 0.05,
            "max_iterations": 4000,
            "goal_tolerance": 0.6,
            "edge_resolution": 0.1
        }
    })");
}

std::string strip_times_csv(const std::string& csv) {
    // blank out the time_ms column (5th)
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() >= 5) cells[4] = "-";
        for (size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
        out += "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("scenario: loads and validates") {
    const Scenario sc = Scenario::from_json(small_scenario_json());
    CHECK(sc.name == "toy");
    CHECK(sc.meta.dim == 2);
    CHECK(sc.planner.step_size == 0.8);
    CHECK(sc.planners.size() == 2);
    auto oracle = sc.make_oracle();
    CHECK(oracle->query(pt(5, 5)));
    CHECK_FALSE(oracle->query(pt(1, 1)));
}

TEST_CASE("scenario: parse errors carry field context") {
    auto j = small_scenario_json();
    j.erase("eps");
    try {
        Scenario::from_json(j);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("eps") != std::string::npos);
    }

    auto j2 = small_scenario_json();
    j2["map"]["shapes"][0]["type"] = "hexagonal-prism";
    try {
        Scenario::from_json(j2);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("hexagonal-prism") != std::string::npos);
    }

    auto j3 = small_scenario_json();
    j3["start"] = {20.0, 20.0};
    CHECK_THROWS_AS(Scenario::from_json(j3), FormatError);
}

TEST_CASE("csv schema is stable") {
    CHECK(csv_header() ==
          "map,planner,sampler,seed,time_ms,iterations,samples_total,samples_wasted,"
          "path_length,found");
    PlanRow r;
    r.map = "m";
    r.planner = "rrt";
    r.sampler = "vanilla";
    r.seed = 7;
    r.time_ms = 1.5;
    r.iterations = 10;
    r.samples_total = 9;
    r.samples_wasted = 2;
    r.path_length = 3.25;
    r.found = true;
    CHECK(to_csv(r) == "m,rrt,vanilla,7,1.5,10,9,2,3.25,1");

    r.found = false;
    r.path_length = std::numeric_limits<double>::infinity();
    CHECK(to_csv(r) == "m,rrt,vanilla,7,1.5,10,9,2,inf,0");
}

TEST_CASE("run_benchmark: deterministic apart from wall time") {
    const Scenario sc = Scenario::from_json(small_scenario_json());
    const ExperimentReport a = run_benchmark(sc, 2);
    const ExperimentReport b = run_benchmark(sc, 4);

    REQUIRE(a.rows.size() == b.rows.size());
    std::string csv_a, csv_b;
    for (const auto& r : a.rows) csv_a += to_csv(r) + "\n";
    for (const auto& r : b.rows) csv_b += to_csv(r) + "\n";
    CHECK(strip_times_csv(csv_a) == strip_times_csv(csv_b));

    // ours never wastes a sample on the fully discovered disk
    for (const auto& r : a.rows)
        if (r.sampler == "ours") CHECK(r.samples_wasted == 0);
}

TEST_CASE("aggregates recompute from rows to 1e-12") {
    const Scenario sc = Scenario::from_json(small_scenario_json());
    const ExperimentReport rep = run_benchmark(sc, 2);

    for (const auto& g : rep.aggregates) {
        const std::string planner = g["planner"];
        const std::string sampler = g["sampler"];
        std::vector<double> iters;
        for (const auto& r : rep.rows)
            if (r.planner == planner && r.sampler == sampler)
                iters.push_back(static_cast<double>(r.iterations));
        double mean = 0.0;
        for (double x : iters) mean += x;
        mean /= iters.size();
        CHECK(std::abs(g["iterations"]["mean"].get<double>() - mean) <= 1e-12 * (1.0 + mean));
    }
}

TEST_CASE("ellipsoid and cross-polytope serialize to JSON") {
    Mat q = Mat::Zero(2, 2);
    q(0, 0) = 0.25;
    q(1, 1) = 1.0;
    const Ellipsoid e(pt(1, 2), q);
    const Json je = to_json(e);
    CHECK(je["center"][0] == 1.0);
    CHECK(je["shape_row_major"].size() == 4);
    CHECK(je["shape_row_major"][0] == 0.25);

    const Json jc = to_json(cross_polytope_bound(e));
    CHECK(jc["vertices"].size() == 4);
}

TEST_CASE("svg output is deterministic and well-formed") {
    const Scenario sc = Scenario::from_json(small_scenario_json());
    auto render = [&]() {
        SvgWriter svg(sc.meta.bounds);
        svg.polygon({pt(1, 1), pt(2, 1), pt(2, 2)}, "red", "black");
        svg.polyline({pt(0, 0), pt(3, 3), pt(4, 1)}, "blue");
        svg.circle(pt(5, 5), 0.5, "green");
        return svg.finish();
    };
    const std::string a = render(), b = render();
    CHECK(a == b);
    CHECK(a.find("<?xml") == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    // every opened polygon/polyline tag is self-closed
    CHECK(a.find("/>") != std::string::npos);
    // no stray unescaped ampersands
    CHECK(a.find('&') == std::string::npos);
}

TEST_CASE("mvee curve: disk error collapses at the seed") {
    const MveeCurve curve = run_mvee_curve(ball(pt(0, 0), 1.0), 0.01);
    REQUIRE(!curve.series.empty());
    CHECK(curve.final_error <= 0.01);
    CHECK(curve.true_volume == Catch::Approx(M_PI).epsilon(1e-3));
}

TEST_CASE("mvee curve: error series is monotone nonincreasing") {
    std::mt19937_64 rng(61);
    const auto verts = random_convex_polygon(rng, 12, pt(0, 0), 0.8, 2.0);
    const MveeCurve curve = run_mvee_curve(polytope(verts), 0.02);
    for (size_t i = 1; i < curve.series.size(); ++i)
        CHECK(curve.series[i].second <= curve.series[i - 1].second + 1e-9);
    CHECK(curve.final_error <= 0.02);
}

TEST_CASE("report files are written") {
    const Scenario sc = Scenario::from_json(small_scenario_json());
    ExperimentReport rep = run_benchmark(sc, 2);
    const std::string dir =
        (std::filesystem::temp_directory_path() / "obscout_report_test").string();
    write_report(rep, dir);
    CHECK(std::filesystem::exists(dir + "/results.csv"));
    CHECK(std::filesystem::exists(dir + "/aggregates.json"));

    std::ifstream csv(dir + "/results.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == csv_header());
}
