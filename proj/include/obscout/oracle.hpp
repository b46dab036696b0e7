#pragma once

#include "obscout/geometry.hpp"
#include "obscout/gjk.hpp"
#include "obscout/pgm.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace obscout {

/// Workspace description: dimension, bounds and the scale parameters the
/// discovery algorithms are allowed to rely on.
struct WorkspaceMeta {
    int dim = 0;
    AABox bounds;
    double eps = 0.0;            // error / separation parameter, in (0,1)
    double inradius_lb = 0.0;    // every obstacle contains a ball of this radius
    double circumradius_ub = 0.0;

    void validate() const {
        if (dim < 1) throw PreconditionError("WorkspaceMeta: dim must be >= 1");
        bounds.validate();
        if (bounds.dim() != dim) throw PreconditionError("WorkspaceMeta: bounds dimension mismatch");
        if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("WorkspaceMeta: eps must be in (0,1)");
        if (inradius_lb < eps)
            throw PreconditionError("WorkspaceMeta: inradius_lb must be >= eps");
        if (inradius_lb > circumradius_ub)
            throw PreconditionError("WorkspaceMeta: inradius_lb > circumradius_ub");
    }

    // Longest ray that can stay inside a single obstacle.
    double ray_limit() const { return 2.0 * circumradius_ub; }
};

struct OracleStats {
    std::uint64_t total_queries = 0;
    std::uint64_t queries_true = 0;
};

/// Binary membership oracle over R^d: query(p) is true iff p lies inside an
/// obstacle. Implementations are immutable after construction; the counters
/// tolerate concurrent queries.
class MembershipOracle {
public:
    explicit MembershipOracle(int dim) : dim_(dim) {}
    virtual ~MembershipOracle() = default;

    MembershipOracle(const MembershipOracle&) = delete;
    MembershipOracle& operator=(const MembershipOracle&) = delete;

    bool query(const Point& p) const {
        const bool hit = contains(p);
        total_.fetch_add(1, std::memory_order_relaxed);
        if (hit) hits_.fetch_add(1, std::memory_order_relaxed);
        return hit;
    }

    OracleStats stats() const {
        return {total_.load(std::memory_order_relaxed), hits_.load(std::memory_order_relaxed)};
    }

    int dim() const { return dim_; }

protected:
    virtual bool contains(const Point& p) const = 0;

private:
    int dim_;
    mutable std::atomic<std::uint64_t> total_{0};
    mutable std::atomic<std::uint64_t> hits_{0};
};

// ---------------------------------------------------------------------------
// Analytic shapes

struct BallShape {
    Point center;
    double radius = 0.0;
};

struct BoxShape {
    AABox box;
};

/// { x : (x-c)^T Q (x-c) <= 1 }, Q symmetric positive definite.
struct EllipsoidShape {
    Point center;
    Mat shape;
};

struct PolytopeShape {
    std::vector<Point> vertices;
};

using ConvexShape = std::variant<BallShape, BoxShape, EllipsoidShape, PolytopeShape>;

namespace detail {

// Membership for one prepared shape. 2-D polygons get a CCW edge walk;
// higher-dimensional vertex polytopes fall back to a point-vs-hull GJK test.
class PreparedShape {
public:
    PreparedShape(ConvexShape shape, int dim) : shape_(std::move(shape)) {
        if (const auto* poly = std::get_if<PolytopeShape>(&shape_)) {
            validate_polytope(*poly, dim);
            if (dim == 2) prepare_polygon(*poly);
            if (dim == 3) prepare_facets_3d(*poly);
        } else if (const auto* ball = std::get_if<BallShape>(&shape_)) {
            if (!(ball->radius > 0.0)) throw DegenerateHullError("analytic oracle: ball with non-positive radius");
            if (ball->center.size() != dim) throw PreconditionError("analytic oracle: ball dimension mismatch");
        } else if (const auto* box = std::get_if<BoxShape>(&shape_)) {
            box->box.validate();
            if (box->box.dim() != dim) throw PreconditionError("analytic oracle: box dimension mismatch");
        } else if (const auto* ell = std::get_if<EllipsoidShape>(&shape_)) {
            if (ell->center.size() != dim || ell->shape.rows() != dim || ell->shape.cols() != dim)
                throw PreconditionError("analytic oracle: ellipsoid dimension mismatch");
            Eigen::LLT<Mat> llt(ell->shape);
            if (llt.info() != Eigen::Success)
                throw DegenerateHullError("analytic oracle: ellipsoid matrix not positive definite");
        }
    }

    bool contains(const Point& p) const {
        return std::visit(
            [&](const auto& s) { return contains_impl(s, p); }, shape_);
    }

    const ConvexShape& shape() const { return shape_; }

private:
    static void validate_polytope(const PolytopeShape& poly, int dim) {
        if (static_cast<int>(poly.vertices.size()) < dim + 1)
            throw DegenerateHullError("analytic oracle: polytope needs at least d+1 vertices");
        Mat m(dim, poly.vertices.size() - 1);
        for (size_t i = 1; i < poly.vertices.size(); ++i)
            m.col(static_cast<int>(i - 1)) = poly.vertices[i] - poly.vertices[0];
        Eigen::JacobiSVD<Mat> svd(m);
        const double scale = svd.singularValues()[0];
        if (svd.singularValues().minCoeff() <= 1e-12 * std::max(scale, 1.0) ||
            svd.rank() < dim)
            throw DegenerateHullError("analytic oracle: polytope vertices are affinely degenerate");
    }

    // Hull facets by triple enumeration; vertex counts are small, so the
    // O(n^4) sweep is a one-time cost that makes queries facet dot products.
    void prepare_facets_3d(const PolytopeShape& poly) {
        const auto& v = poly.vertices;
        const int n = static_cast<int>(v.size());
        Point centroid = Point::Zero(3);
        for (const auto& p : v) centroid += p;
        centroid /= static_cast<double>(n);
        double scale = 0.0;
        for (const auto& p : v) scale = std::max(scale, (p - centroid).norm());

        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k) {
                    const Vec a = v[j] - v[i], b = v[k] - v[i];
                    Vec nrm(3);
                    nrm << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                        a[0] * b[1] - a[1] * b[0];
                    const double len = nrm.norm();
                    if (len < 1e-12 * scale * scale) continue;
                    nrm /= len;
                    double off = nrm.dot(v[i]);
                    if (nrm.dot(centroid) > off) {
                        nrm = -nrm;
                        off = -off;
                    }
                    bool facet = true;
                    for (int m = 0; m < n && facet; ++m)
                        if (nrm.dot(v[m]) > off + 1e-9 * scale) facet = false;
                    if (facet) facets_3d_.emplace_back(nrm, off);
                }
        facet_tol_ = 1e-12 * std::max(scale, 1.0);
    }

    void prepare_polygon(const PolytopeShape& poly) {
        // CCW order around the centroid; convexity is assumed per the
        // obstacle model, so angular sorting is enough.
        Point c = Point::Zero(2);
        for (const auto& v : poly.vertices) c += v;
        c /= static_cast<double>(poly.vertices.size());
        polygon_ccw_ = poly.vertices;
        std::sort(polygon_ccw_.begin(), polygon_ccw_.end(), [&](const Point& a, const Point& b) {
            return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
        });
    }

    static bool contains_impl(const BallShape& s, const Point& p) {
        return (p - s.center).norm() <= s.radius;
    }
    static bool contains_impl(const BoxShape& s, const Point& p) { return s.box.contains(p); }
    static bool contains_impl(const EllipsoidShape& s, const Point& p) {
        const Vec d = p - s.center;
        return d.dot(s.shape * d) <= 1.0;
    }
    bool contains_impl(const PolytopeShape& s, const Point& p) const {
        if (!polygon_ccw_.empty()) {
            const size_t n = polygon_ccw_.size();
            for (size_t i = 0; i < n; ++i) {
                const Point& a = polygon_ccw_[i];
                const Point& b = polygon_ccw_[(i + 1) % n];
                const double cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                if (cross < -1e-12) return false;
            }
            return true;
        }
        if (!facets_3d_.empty()) {
            for (const auto& [nrm, off] : facets_3d_)
                if (nrm.dot(p) > off + facet_tol_) return false;
            return true;
        }
        std::vector<Point> single{p};
        return gjk_distance(s.vertices, single, 1e-12).intersects;
    }

    ConvexShape shape_;
    std::vector<Point> polygon_ccw_;  // only for d=2 polytopes
    std::vector<std::pair<Vec, double>> facets_3d_;
    double facet_tol_ = 1e-12;
};

}  // namespace detail

class AnalyticOracle final : public MembershipOracle {
public:
    AnalyticOracle(std::vector<ConvexShape> shapes, const WorkspaceMeta& meta)
        : MembershipOracle(meta.dim) {
        meta.validate();
        shapes_.reserve(shapes.size());
        for (auto& s : shapes) shapes_.emplace_back(std::move(s), meta.dim);
    }

    size_t shape_count() const { return shapes_.size(); }

protected:
    bool contains(const Point& p) const override {
        for (const auto& s : shapes_)
            if (s.contains(p)) return true;
        return false;
    }

private:
    std::vector<detail::PreparedShape> shapes_;
};

/// Obstacle map backed by a grayscale bitmap: a point is an obstacle point
/// iff the pixel owning it (floor of scaled coordinates, rows flipped so the
/// world y-axis points up) is at or below the threshold.
class BitmapOracle final : public MembershipOracle {
public:
    BitmapOracle(GrayImage image, int threshold, const WorkspaceMeta& meta)
        : MembershipOracle(meta.dim), img_(std::move(image)), threshold_(threshold), bounds_(meta.bounds) {
        meta.validate();
        if (meta.dim != 2) throw PreconditionError("bitmap oracle: d must be 2");
        cell_x_ = (bounds_.hi[0] - bounds_.lo[0]) / img_.width;
        cell_y_ = (bounds_.hi[1] - bounds_.lo[1]) / img_.height;
    }

    const GrayImage& image() const { return img_; }
    const AABox& bounds() const { return bounds_; }

    std::pair<int, int> pixel_of(const Point& p) const {
        int col = static_cast<int>(std::floor((p[0] - bounds_.lo[0]) / cell_x_));
        int row_up = static_cast<int>(std::floor((p[1] - bounds_.lo[1]) / cell_y_));
        col = std::min(std::max(col, 0), img_.width - 1);
        row_up = std::min(std::max(row_up, 0), img_.height - 1);
        return {col, img_.height - 1 - row_up};
    }

protected:
    bool contains(const Point& p) const override {
        if (!bounds_.contains(p)) return false;
        const auto [col, row] = pixel_of(p);
        return img_.at(col, row) <= threshold_;
    }

private:
    GrayImage img_;
    int threshold_;
    AABox bounds_;
    double cell_x_ = 1.0;
    double cell_y_ = 1.0;
};

inline std::unique_ptr<MembershipOracle> make_analytic_oracle(std::vector<ConvexShape> shapes,
                                                              const WorkspaceMeta& meta) {
    return std::make_unique<AnalyticOracle>(std::move(shapes), meta);
}

inline std::unique_ptr<MembershipOracle> make_bitmap_oracle(const std::string& map_file,
                                                            int threshold,
                                                            const WorkspaceMeta& meta) {
    return std::make_unique<BitmapOracle>(read_pgm(map_file), threshold, meta);
}

}  // namespace obscout
