#pragma once

#include "obscout/geometry.hpp"
#include "obscout/gjk.hpp"
#include "obscout/mvee.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace obscout {

/// One simplicial region of the triangulated free space.
struct Region {
    std::vector<Point> simplex;  // d+1 vertices
    double volume = 0.0;
    std::uint64_t id = 0;
};

namespace detail {

using Simplex = std::vector<Point>;

// Splits a simplex along the hyperplane n.x = b into simplices lying on the
// n.x <= b side ("inside") and the n.x >= b side. Works by inserting the
// intersection point of one crossing edge at a time, which cuts a simplex
// into two valid simplices, and recursing until no edge crosses.
inline void split_simplex_by_hyperplane(const Simplex& s, const Vec& n, double b,
                                        std::vector<Simplex>& inside,
                                        std::vector<Simplex>& outside, double tol) {
    const int k = static_cast<int>(s.size());
    int neg = -1, pos = -1;
    double worst_neg = -tol, worst_pos = tol;
    for (int i = 0; i < k; ++i) {
        const double d = n.dot(s[i]) - b;
        if (d < worst_neg) {
            worst_neg = d;
            neg = i;
        }
        if (d > worst_pos) {
            worst_pos = d;
            pos = i;
        }
    }
    if (neg < 0) {
        outside.push_back(s);
        return;
    }
    if (pos < 0) {
        inside.push_back(s);
        return;
    }
    const double dn = n.dot(s[neg]) - b;
    const double dp = n.dot(s[pos]) - b;
    const double t = dn / (dn - dp);
    const Point w = s[neg] + t * (s[pos] - s[neg]);

    Simplex a = s;
    a[pos] = w;
    Simplex c = s;
    c[neg] = w;
    split_simplex_by_hyperplane(a, n, b, inside, outside, tol);
    split_simplex_by_hyperplane(c, n, b, inside, outside, tol);
}

inline double signed_area2(const Point& a, const Point& b, const Point& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// p strictly inside the circumcircle of CCW triangle (a,b,c)?
inline bool in_circumcircle(const Point& a, const Point& b, const Point& c, const Point& p,
                            double tol) {
    const double ax = a[0] - p[0], ay = a[1] - p[1];
    const double bx = b[0] - p[0], by = b[1] - p[1];
    const double cx = c[0] - p[0], cy = c[1] - p[1];
    const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                       (bx * bx + by * by) * (ax * cy - cx * ay) +
                       (cx * cx + cy * cy) * (ax * by - bx * ay);
    return det > tol;
}

}  // namespace detail

/// Simplicial partition of the workspace minus the discovered cross-polytopes,
/// with volume bookkeeping for volume-proportional sampling.
class TriangulatedFreeSpace {
public:
    struct RemovedRecord {
        CrossPolytope polytope;
        double intersected_volume = 0.0;
    };

    static TriangulatedFreeSpace triangulate_bounds(const AABox& bounds) {
        bounds.validate();
        const int d = bounds.dim();
        if (d != 2 && d != 3)
            throw PreconditionError("triangulate_bounds: only d=2 and d=3 are supported");

        TriangulatedFreeSpace fs;
        fs.bounds_ = bounds;
        if (d == 2) {
            Point p00 = bounds.lo, p11 = bounds.hi;
            Point p10 = bounds.lo, p01 = bounds.lo;
            p10[0] = bounds.hi[0];
            p01[1] = bounds.hi[1];
            fs.push_region({p00, p10, p11});
            fs.push_region({p00, p11, p01});
        } else {
            // Kuhn subdivision: one tetrahedron per axis permutation, walking
            // from the low corner to the high corner.
            const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                     {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
            const Vec ext = bounds.extent();
            for (const auto& perm : perms) {
                std::vector<Point> tet{bounds.lo};
                Point cur = bounds.lo;
                for (int step = 0; step < 3; ++step) {
                    cur[perm[step]] += ext[perm[step]];
                    tet.push_back(cur);
                }
                fs.push_region(std::move(tet));
            }
        }
        fs.recompute_total();
        return fs;
    }

    const std::vector<Region>& regions() const { return regions_; }
    double total_volume() const { return total_volume_; }
    const AABox& bounds() const { return bounds_; }
    const std::vector<RemovedRecord>& removed() const { return removed_; }
    std::uint64_t version() const { return version_; }

    bool inside_removed(const Point& p) const {
        for (const auto& r : removed_)
            if (r.polytope.contains(p)) return true;
        return false;
    }

    /// Subtracts conv(C) from the free space. Affected regions are found with
    /// GJK, decomposed against the polytope facets, and in 2-D the residue is
    /// re-triangulated to the constrained Delaunay configuration by edge
    /// flips. Unaffected regions keep their ids.
    void remove_polytope(const CrossPolytope& c) {
        const int d = bounds_.dim();
        if (c.dim() != d) throw PreconditionError("remove_polytope: dimension mismatch");
        const double vol_tol = 1e-12 * std::max(1.0, bounds_.volume());
        const auto facets = c.facet_halfspaces();

        std::vector<Region> kept;
        std::vector<detail::Simplex> residue;
        double removed_vol = 0.0;
        for (auto& region : regions_) {
            if (!gjk_distance(region.simplex, c.vertices).intersects) {
                kept.push_back(std::move(region));
                continue;
            }
            // Peel the facets one at a time; anything on the outer side of a
            // facet is free space, anything inside all of them is removed.
            // Pieces that separate from the polytope early are kept whole.
            std::vector<detail::Simplex> region_residue;
            double inside_vol = 0.0;
            auto decompose = [&](auto&& self, detail::Simplex s, size_t fi) -> void {
                if (fi == facets.size()) {
                    inside_vol += simplex_volume(s);
                    return;
                }
                if (fi > 0 && !gjk_distance(s, c.vertices).intersects) {
                    region_residue.push_back(std::move(s));
                    return;
                }
                const auto& [n, b] = facets[fi];
                std::vector<detail::Simplex> ins, outs;
                detail::split_simplex_by_hyperplane(s, n, b, ins, outs,
                                                    1e-12 * (1.0 + std::abs(b)));
                for (auto& o : outs)
                    if (simplex_volume(o) > vol_tol) region_residue.push_back(std::move(o));
                for (auto& i : ins)
                    if (simplex_volume(i) > vol_tol) self(self, std::move(i), fi + 1);
            };
            decompose(decompose, region.simplex, 0);
            if (inside_vol <= vol_tol) {
                kept.push_back(std::move(region));  // touching only
                continue;
            }
            removed_vol += inside_vol;
            for (auto& s : region_residue) residue.push_back(std::move(s));
        }

                if (d == 2) delaunay_flips(residue, facets);

        regions_ = std::move(kept);
        for (auto& s : residue) push_region(std::move(s));
        recompute_total();
        ++version_;
        removed_.push_back({c, removed_vol});
        if (total_volume_ <= vol_tol)
            throw FreeSpaceExhaustedError("remove_polytope: free space exhausted");
    }

private:
    void push_region(detail::Simplex s) {
        Region r;
        r.volume = simplex_volume(s);
        r.simplex = std::move(s);
        r.id = next_id_++;
        regions_.push_back(std::move(r));
    }

    void recompute_total() {
        total_volume_ = 0.0;
        for (const auto& r : regions_) total_volume_ += r.volume;
    }

    // Lawson flips towards the constrained Delaunay triangulation of the
    // residue. Constrained edges (polytope facets and the residue border) are
    // left in place.
    void delaunay_flips(std::vector<detail::Simplex>& tris,
                        const std::vector<std::pair<Vec, double>>& facets) const {
        if (tris.size() < 2) return;
        const double quantum = 1e-9 * bounds_.extent().maxCoeff();
        auto key_of = [&](const Point& p) {
            return std::pair<long long, long long>(
                static_cast<long long>(std::llround(p[0] / quantum)),
                static_cast<long long>(std::llround(p[1] / quantum)));
        };
        auto on_facet = [&](const Point& a, const Point& b) {
            for (const auto& [n, off] : facets) {
                const double scale = 1e-9 * (1.0 + std::abs(off));
                if (std::abs(n.dot(a) - off) <= scale && std::abs(n.dot(b) - off) <= scale)
                    return true;
            }
            return false;
        };

        for (int round = 0; round < 64; ++round) {
            // Rebuild adjacency; the flip pass below invalidates it.
            std::map<std::pair<std::pair<long long, long long>, std::pair<long long, long long>>,
                     std::vector<std::pair<int, int>>>
                edges;  // edge -> (triangle, opposite-vertex index)
            for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
                for (int e = 0; e < 3; ++e) {
                    auto ka = key_of(tris[t][e]);
                    auto kb = key_of(tris[t][(e + 1) % 3]);
                    if (kb < ka) std::swap(ka, kb);
                    edges[{ka, kb}].emplace_back(t, (e + 2) % 3);
                }
            }

            bool flipped = false;
            for (const auto& [key, owners] : edges) {
                if (owners.size() != 2) continue;
                auto [t1, o1] = owners[0];
                auto [t2, o2] = owners[1];
                const Point c1 = tris[t1][o1];
                const Point c2 = tris[t2][o2];
                const Point a = tris[t1][(o1 + 1) % 3];
                const Point b = tris[t1][(o1 + 2) % 3];
                if (on_facet(a, b)) continue;

                Point ta = a, tb = b;
                if (detail::signed_area2(ta, tb, c1) < 0) std::swap(ta, tb);
                const double tol = 1e-18 * std::pow(bounds_.extent().maxCoeff(), 4);
                if (!detail::in_circumcircle(ta, tb, c1, c2, tol)) continue;
                // Flip only when the quad is strictly convex.
                const double a1 = detail::signed_area2(c1, c2, a);
                const double a2 = detail::signed_area2(c1, c2, b);
                if (a1 * a2 >= 0) continue;

                tris[t1] = {c1, c2, a};
                tris[t2] = {c2, c1, b};
                flipped = true;
                break;  // adjacency is stale, restart the scan
            }
            if (!flipped) break;
        }
    }

    std::vector<Region> regions_;
    double total_volume_ = 0.0;
    std::vector<RemovedRecord> removed_;
    AABox bounds_;
    std::uint64_t next_id_ = 1;
    std::uint64_t version_ = 0;
};

inline TriangulatedFreeSpace triangulate_bounds(const AABox& bounds) {
    return TriangulatedFreeSpace::triangulate_bounds(bounds);
}

/// Per-caller sampling state: the rng plus the cached cumulative volume table
/// used for volume-proportional region selection.
class SamplerState {
public:
    explicit SamplerState(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    const std::vector<double>& cumulative(const TriangulatedFreeSpace& fs) {
        if (cached_version_ != fs.version() || cum_.size() != fs.regions().size()) {
            cum_.clear();
            cum_.reserve(fs.regions().size());
            double acc = 0.0;
            for (const auto& r : fs.regions()) {
                acc += r.volume;
                cum_.push_back(acc);
            }
            cached_version_ = fs.version();
        }
        return cum_;
    }

private:
    std::mt19937_64 rng_;
    std::vector<double> cum_;
    std::uint64_t cached_version_ = ~0ull;
};

/// Uniform point inside a simplex via sorted-uniform barycentric gaps.
inline Point sample_in_simplex(const std::vector<Point>& verts, std::mt19937_64& rng) {
    const size_t k = verts.size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> cuts(k - 1);
    for (auto& c : cuts) c = unit(rng);
    std::sort(cuts.begin(), cuts.end());
    Point x = Point::Zero(verts[0].size());
    double prev = 0.0;
    for (size_t i = 0; i < k; ++i) {
        const double next = (i + 1 < k) ? cuts[i] : 1.0;
        x += (next - prev) * verts[i];
        prev = next;
    }
    return x;
}

/// Volume-proportional region choice, then a uniform draw inside the chosen
/// simplex.
inline Point sample(const TriangulatedFreeSpace& fs, SamplerState& state) {
    if (fs.total_volume() <= 0.0 || fs.regions().empty())
        throw FreeSpaceExhaustedError("sample: no free space left");
    const auto& cum = state.cumulative(fs);
    std::uniform_real_distribution<double> unit(0.0, cum.back());
    const double r = unit(state.rng());
    const auto it = std::upper_bound(cum.begin(), cum.end(), r);
    const size_t idx = std::min(static_cast<size_t>(it - cum.begin()), cum.size() - 1);
    return sample_in_simplex(fs.regions()[idx].simplex, state.rng());
}

}  // namespace obscout
