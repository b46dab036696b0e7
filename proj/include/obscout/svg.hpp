#pragma once

#include "obscout/geometry.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace obscout {

/// Minimal deterministic SVG writer for maps, triangulations, trees and
/// curves. World y points up; the viewBox flip is handled here.
class SvgWriter {
public:
    SvgWriter(const AABox& world, double pixels_per_unit = 6.0)
        : world_(world), scale_(pixels_per_unit) {
        const double w = world.extent()[0] * scale_;
        const double h = world.extent()[1] * scale_;
        body_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) + "\" height=\"" +
                 fmt(h) + "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\">\n";
        body_ += "<rect width=\"" + fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"white\"/>\n";
    }

    void polygon(const std::vector<Point>& pts, const std::string& fill,
                 const std::string& stroke, double stroke_width = 1.0) {
        body_ += "<polygon points=\"";
        for (size_t i = 0; i < pts.size(); ++i) {
            if (i) body_ += " ";
            body_ += coord(pts[i]);
        }
        body_ += "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt(stroke_width) + "\"/>\n";
    }

    void polyline(const std::vector<Point>& pts, const std::string& stroke,
                  double stroke_width = 1.0) {
        body_ += "<polyline points=\"";
        for (size_t i = 0; i < pts.size(); ++i) {
            if (i) body_ += " ";
            body_ += coord(pts[i]);
        }
        body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(stroke_width) +
                 "\"/>\n";
    }

    void line(const Point& a, const Point& b, const std::string& stroke, double stroke_width = 1.0) {
        body_ += "<line x1=\"" + fmt(px(a[0])) + "\" y1=\"" + fmt(py(a[1])) + "\" x2=\"" +
                 fmt(px(b[0])) + "\" y2=\"" + fmt(py(b[1])) + "\" stroke=\"" + stroke +
                 "\" stroke-width=\"" + fmt(stroke_width) + "\"/>\n";
    }

    void circle(const Point& c, double world_radius, const std::string& fill) {
        body_ += "<circle cx=\"" + fmt(px(c[0])) + "\" cy=\"" + fmt(py(c[1])) + "\" r=\"" +
                 fmt(world_radius * scale_) + "\" fill=\"" + fill + "\"/>\n";
    }

    void text(const Point& at, const std::string& s, int size_px = 12) {
        body_ += "<text x=\"" + fmt(px(at[0])) + "\" y=\"" + fmt(py(at[1])) + "\" font-size=\"" +
                 std::to_string(size_px) + "\">" + s + "</text>\n";
    }

    std::string finish() const { return body_ + "</svg>\n"; }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw FileError("svg: cannot write '" + path + "'");
        out << finish();
    }

private:
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return buf;
    }
    double px(double x) const { return (x - world_.lo[0]) * scale_; }
    double py(double y) const { return (world_.hi[1] - y) * scale_; }
    std::string coord(const Point& p) const { return fmt(px(p[0])) + "," + fmt(py(p[1])); }

    AABox world_;
    double scale_;
    std::string body_;
};

}  // namespace obscout
