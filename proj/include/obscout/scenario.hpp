#pragma once

#include "obscout/geometry.hpp"
#include "obscout/oracle.hpp"
#include "obscout/planners.hpp"
#include "obscout/ray_search.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace obscout {

namespace detail {

inline Vec vec_field(const nlohmann::json& j, const std::string& key, int dim = -1) {
    if (!j.contains(key)) throw FormatError("scenario: missing field '" + key + "'");
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw FormatError("scenario: field '" + key + "' must be an array");
    Vec v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
    if (dim >= 0 && v.size() != dim)
        throw FormatError("scenario: field '" + key + "' has wrong dimension");
    return v;
}

template <typename T>
T field(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw FormatError("scenario: missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("scenario: field '" + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return field<T>(j, key);
}

inline ConvexShape shape_from_json(const nlohmann::json& j, int dim) {
    const std::string type = field<std::string>(j, "type");
    if (type == "ball") {
        BallShape s;
        s.center = vec_field(j, "center", dim);
        s.radius = field<double>(j, "radius");
        return s;
    }
    if (type == "box") {
        BoxShape s;
        s.box.lo = vec_field(j, "lo", dim);
        s.box.hi = vec_field(j, "hi", dim);
        return s;
    }
    if (type == "ellipsoid") {
        EllipsoidShape s;
        s.center = vec_field(j, "center", dim);
        if (j.contains("shape_row_major")) {
            const auto q = field<std::vector<double>>(j, "shape_row_major");
            if (static_cast<int>(q.size()) != dim * dim)
                throw FormatError("scenario: ellipsoid shape_row_major has wrong size");
            s.shape = Mat(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) s.shape(r, c) = q[r * dim + c];
        } else {
            const Vec semi = vec_field(j, "semi_axes", dim);
            Mat rot = Mat::Identity(dim, dim);
            const double deg = field_or<double>(j, "rotation_deg", 0.0);
            if (deg != 0.0) {
                if (dim != 2)
                    throw FormatError("scenario: rotation_deg only supported for d=2");
                const double a = deg * std::numbers::pi / 180.0;
                rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
            }
            Mat diag = Mat::Zero(dim, dim);
            for (int i = 0; i < dim; ++i) diag(i, i) = 1.0 / (semi[i] * semi[i]);
            s.shape = rot * diag * rot.transpose();
        }
        return s;
    }
    if (type == "polygon" || type == "polytope") {
        PolytopeShape s;
        if (!j.contains("vertices")) throw FormatError("scenario: polytope needs 'vertices'");
        for (const auto& v : j.at("vertices")) {
            Vec p(v.size());
            for (size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i].get<double>();
            if (p.size() != dim) throw FormatError("scenario: polytope vertex has wrong dimension");
            s.vertices.push_back(std::move(p));
        }
        return s;
    }
    throw FormatError("scenario: unknown shape type '" + type + "'");
}

}  // namespace detail

/// One experiment description: the map source, workspace parameters, the
/// start/goal pair, the planner roster and the trial/budget bookkeeping.
struct Scenario {
    std::string name;
    WorkspaceMeta meta;
    RaySearchOptions ray;

    bool bitmap = false;
    std::string bitmap_path;
    int bitmap_threshold = 128;
    double meters_per_pixel = 0.0;  // informational; bounds define the mapping
    std::vector<ConvexShape> shapes;

    Point start;
    Point goal;
    std::vector<std::string> planners;
    int trials = 1;
    std::uint64_t seed = 0;
    std::uint64_t preprocess_budget = 1000;
    PlannerConfig planner;

    std::unique_ptr<MembershipOracle> make_oracle() const {
        if (bitmap) return make_bitmap_oracle(bitmap_path, bitmap_threshold, meta);
        return make_analytic_oracle(shapes, meta);
    }

    void validate() const {
        meta.validate();
        if (trials < 1) throw FormatError("scenario: trials must be >= 1");
        if (start.size() != meta.dim || goal.size() != meta.dim)
            throw FormatError("scenario: start/goal dimension mismatch");
        if (!meta.bounds.contains(start)) throw FormatError("scenario: start outside bounds");
        if (!meta.bounds.contains(goal)) throw FormatError("scenario: goal outside bounds");
        if (bitmap && !std::filesystem::exists(bitmap_path))
            throw FileError("scenario: bitmap '" + bitmap_path + "' does not exist");
    }

    static Scenario from_json(const nlohmann::json& j, const std::string& base_dir = ".") {
        Scenario s;
        s.name = detail::field_or<std::string>(j, "name", "scenario");
        const auto& bounds = j.contains("bounds") ? j.at("bounds") : throw FormatError("scenario: missing field 'bounds'");
        s.meta.bounds.lo = detail::vec_field(bounds, "lo");
        s.meta.bounds.hi = detail::vec_field(bounds, "hi", static_cast<int>(s.meta.bounds.lo.size()));
        s.meta.dim = s.meta.bounds.dim();
        s.meta.eps = detail::field<double>(j, "eps");
        s.meta.inradius_lb = detail::field<double>(j, "inradius_lb");
        s.meta.circumradius_ub = detail::field<double>(j, "circumradius_ub");
        s.ray.growth_base = detail::field_or<double>(j, "ray_growth_base", 2.0);

        const auto& map = j.contains("map") ? j.at("map") : throw FormatError("scenario: missing field 'map'");
        const std::string type = detail::field<std::string>(map, "type");
        if (type == "bitmap") {
            s.bitmap = true;
            const std::string rel = detail::field<std::string>(map, "path");
            s.bitmap_path = (std::filesystem::path(rel).is_absolute()
                                 ? rel
                                 : (std::filesystem::path(base_dir) / rel).string());
            s.bitmap_threshold = detail::field_or<int>(map, "threshold", 128);
            s.meters_per_pixel = detail::field_or<double>(map, "meters_per_pixel", 0.0);
        } else if (type == "analytic") {
            if (!map.contains("shapes")) throw FormatError("scenario: analytic map needs 'shapes'");
            for (const auto& sh : map.at("shapes"))
                s.shapes.push_back(detail::shape_from_json(sh, s.meta.dim));
        } else {
            throw FormatError("scenario: unknown map type '" + type + "'");
        }

        s.start = detail::vec_field(j, "start", s.meta.dim);
        s.goal = detail::vec_field(j, "goal", s.meta.dim);
        s.planners = detail::field_or<std::vector<std::string>>(j, "planners", {"rrt"});
        s.trials = detail::field_or<int>(j, "trials", 1);
        s.seed = detail::field_or<std::uint64_t>(j, "seed", 0);
        s.preprocess_budget = detail::field_or<std::uint64_t>(j, "preprocess_budget", 1000);

        if (!j.contains("planner")) throw FormatError("scenario: missing field 'planner'");
        const auto& pc = j.at("planner");
        s.planner.step_size = detail::field<double>(pc, "step_size");
        s.planner.goal_bias = detail::field_or<double>(pc, "goal_bias", 0.05);
        s.planner.max_iterations = detail::field<int>(pc, "max_iterations");
        s.planner.goal_tolerance = detail::field<double>(pc, "goal_tolerance");
        s.planner.rewire_radius_factor = detail::field_or<double>(pc, "rewire_radius_factor", 2.0);
        s.planner.edge_resolution = detail::field_or<double>(pc, "edge_resolution", s.meta.eps);

        s.validate();
        return s;
    }

    static Scenario load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw FileError("scenario: cannot open '" + path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("scenario '" + path + "': " + e.what());
        }
        return from_json(j, std::filesystem::path(path).parent_path().string());
    }
};

}  // namespace obscout
