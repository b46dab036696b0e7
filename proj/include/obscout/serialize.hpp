#pragma once

#include "obscout/freespace.hpp"
#include "obscout/mvee.hpp"

#include <json.hpp>

#include <vector>

namespace obscout {

using Json = nlohmann::json;

inline Json to_json(const Ellipsoid& e) {
    Json j;
    j["center"] = std::vector<double>(e.center().data(), e.center().data() + e.dim());
    std::vector<double> q;
    for (int r = 0; r < e.dim(); ++r)
        for (int c = 0; c < e.dim(); ++c) q.push_back(e.shape()(r, c));
    j["shape_row_major"] = q;
    j["volume"] = e.volume();
    return j;
}

inline Json to_json(const CrossPolytope& cp) {
    Json j;
    j["center"] = std::vector<double>(cp.center.data(), cp.center.data() + cp.dim());
    Json verts = Json::array();
    for (const auto& v : cp.vertices)
        verts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    j["vertices"] = verts;
    return j;
}

inline Json triangulation_to_json(const TriangulatedFreeSpace& fs) {
    Json regions = Json::array();
    for (const auto& r : fs.regions()) {
        Json verts = Json::array();
        for (const auto& v : r.simplex)
            verts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
        regions.push_back({{"id", r.id}, {"volume", r.volume}, {"vertices", verts}});
    }
    return regions;
}

}  // namespace obscout
