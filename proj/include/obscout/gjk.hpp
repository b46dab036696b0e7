#pragma once

#include "obscout/geometry.hpp"

#include <limits>
#include <vector>

namespace obscout {

struct GjkResult {
    bool intersects = false;
    double distance = 0.0;  // separation distance, 0 when intersecting
};

namespace detail {

inline int support_index(const std::vector<Point>& pts, const Vec& dir) {
    int best = 0;
    double best_dot = pts[0].dot(dir);
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
        const double d = pts[i].dot(dir);
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return best;
}

// Closest point to the origin on conv(W), |W| <= d+1. Enumerates support
// subsets and solves the affine projection on each; returns the feasible
// candidate of smallest norm together with its subset.
inline Vec closest_on_simplex(std::vector<Vec>& W) {
    const int n = static_cast<int>(W.size());
    double best_norm2 = std::numeric_limits<double>::infinity();
    Vec best_point;
    std::vector<Vec> best_subset;

    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) idx.push_back(i);
        const int m = static_cast<int>(idx.size()) - 1;

        Vec candidate;
        std::vector<double> lambda(idx.size());
        if (m == 0) {
            candidate = W[idx[0]];
            lambda[0] = 1.0;
        } else {
            Mat D(W[0].size(), m);
            for (int j = 0; j < m; ++j) D.col(j) = W[idx[j + 1]] - W[idx[0]];
            const Mat G = D.transpose() * D;
            Eigen::LDLT<Mat> ldlt(G);
            if (ldlt.info() != Eigen::Success) continue;
            const Vec mu = ldlt.solve(-D.transpose() * W[idx[0]]);
            if ((G * mu + D.transpose() * W[idx[0]]).norm() > 1e-9 * (1.0 + W[idx[0]].norm()))
                continue;  // affinely dependent subset, skip
            double s = 0.0;
            for (int j = 0; j < m; ++j) {
                lambda[j + 1] = mu[j];
                s += mu[j];
            }
            lambda[0] = 1.0 - s;
            candidate = W[idx[0]] + D * mu;
        }

        bool feasible = true;
        for (double l : lambda)
            if (l < -1e-12) feasible = false;
        if (!feasible) continue;

        const double n2 = candidate.squaredNorm();
        if (n2 < best_norm2 - 1e-18 ||
            (n2 < best_norm2 + 1e-18 && idx.size() < best_subset.size())) {
            best_norm2 = n2;
            best_point = candidate;
            best_subset.clear();
            for (int i : idx) best_subset.push_back(W[i]);
        }
    }

    W = best_subset;
    return best_point;
}

}  // namespace detail

/// Distance between conv(A) and conv(B); intersects iff the distance is
/// below the termination tolerance.
inline GjkResult gjk_distance(const std::vector<Point>& A, const std::vector<Point>& B,
                              double tol = 1e-9) {
    if (A.empty() || B.empty()) throw PreconditionError("gjk_distance: empty vertex set");

    auto support = [&](const Vec& dir) -> Vec {
        return A[detail::support_index(A, dir)] - B[detail::support_index(B, -dir)];
    };

    Vec v = A[0] - B[0];
    if (v.norm() < tol) return {true, 0.0};
    std::vector<Vec> W{v};

    for (int iter = 0; iter < 128; ++iter) {
        const double vn = v.norm();
        const Vec w = support(-v);
        // No point of the difference body lies past v towards the origin.
        if (vn - v.dot(w) / vn <= tol) break;

        W.push_back(w);
        const Vec v_new = detail::closest_on_simplex(W);
        if (v_new.norm() < tol) return {true, 0.0};
        if (v_new.norm() >= vn - 1e-14) break;  // stalled numerically
        v = v_new;
    }

    const double d = v.norm();
    if (d <= tol) return {true, 0.0};
    return {false, d};
}

inline bool gjk_intersects(const std::vector<Point>& A, const std::vector<Point>& B,
                           double tol = 1e-9) {
    return gjk_distance(A, B, tol).intersects;
}

}  // namespace obscout
