#pragma once

#include "obscout/extremal.hpp"
#include "obscout/geometry.hpp"
#include "obscout/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace obscout {

/// { x : ||L(x - c)||^2 <= 1 } with Q = L^T L symmetric positive definite.
class Ellipsoid {
public:
    Ellipsoid(Point center, Mat shape) : center_(std::move(center)) {
        shape_ = 0.5 * (shape + shape.transpose());
        Eigen::LLT<Mat> llt(shape_);
        if (llt.info() != Eigen::Success)
            throw DegenerateHullError("Ellipsoid: shape matrix is not positive definite");
        factor_ = llt.matrixU();  // Q = factor^T * factor
    }

    int dim() const { return static_cast<int>(center_.size()); }
    const Point& center() const { return center_; }
    const Mat& shape() const { return shape_; }
    const Mat& factor() const { return factor_; }

    double mahalanobis(const Point& x) const { return (factor_ * (x - center_)).norm(); }

    double volume() const {
        double det_factor = 1.0;
        for (int i = 0; i < dim(); ++i) det_factor *= factor_(i, i);
        return unit_ball_volume(dim()) / std::abs(det_factor);
    }

    /// Same center and orientation, radii multiplied by s.
    Ellipsoid scaled(double s) const { return Ellipsoid(center_, shape_ / (s * s)); }

    /// Principal axes: unit eigenvectors of Q (columns) and semi-axis lengths.
    std::pair<Mat, Vec> principal_axes() const {
        Eigen::SelfAdjointEigenSolver<Mat> es(shape_);
        if (es.info() != Eigen::Success) throw Error("Ellipsoid: eigendecomposition failed");
        Vec semi = es.eigenvalues().array().rsqrt();
        return {es.eigenvectors(), std::move(semi)};
    }

private:
    Point center_;
    Mat shape_;
    Mat factor_;
};

// ---------------------------------------------------------------------------
// Finite-point-set MVEE (Khachiyan barycentric ascent with away steps)

namespace detail {

struct KhachiyanState {
    Vec weights;
    Point center;
    Mat covariance;  // sum_i w_i p_i p_i^T - c c^T
    int iterations = 0;
};

inline KhachiyanState khachiyan_weights(const std::vector<Point>& pts, double delta_stop,
                                        long max_iter = 2000000) {
    const int n = static_cast<int>(pts.size());
    const int d = static_cast<int>(pts[0].size());
    const int dl = d + 1;

    Mat lifted(dl, n);
    for (int i = 0; i < n; ++i) {
        lifted.col(i).head(d) = pts[i];
        lifted(d, i) = 1.0;
    }

    Vec w = Vec::Constant(n, 1.0 / n);
    Mat M = Mat::Zero(dl, dl);
    for (int i = 0; i < n; ++i) M += w[i] * lifted.col(i) * lifted.col(i).transpose();

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        Eigen::LDLT<Mat> ldlt(M);
        if (ldlt.info() != Eigen::Success)
            throw DegenerateHullError("mvee: degenerate hull (singular moment matrix)");
        const Mat solved = ldlt.solve(lifted);
        int best_up = 0, best_down = -1;
        double kappa_up = -1.0, kappa_down = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const double kappa = lifted.col(i).dot(solved.col(i));
            if (kappa > kappa_up) {
                kappa_up = kappa;
                best_up = i;
            }
            if (w[i] > 1e-14 && kappa < kappa_down) {
                kappa_down = kappa;
                best_down = i;
            }
        }
        const double delta_up = kappa_up / dl - 1.0;
        const double delta_down = 1.0 - kappa_down / dl;
        if (std::max(delta_up, delta_down) <= delta_stop) break;

        if (delta_up >= delta_down) {
            const double beta = (kappa_up - dl) / (dl * (kappa_up - 1.0));
            w *= (1.0 - beta);
            w[best_up] += beta;
            M = (1.0 - beta) * M +
                beta * lifted.col(best_up) * lifted.col(best_up).transpose();
        } else {
            // Away step: move weight off the worst support point, dropping it
            // entirely when the step is clamped.
            const double theta_raw = (dl - kappa_down) / (dl * (kappa_down - 1.0));
            const double theta_cap = w[best_down] / (1.0 - w[best_down]);
            const double theta = std::min(theta_raw, theta_cap);
            w *= (1.0 + theta);
            w[best_down] -= theta;
            if (theta == theta_cap) w[best_down] = 0.0;
            M = (1.0 + theta) * M -
                theta * lifted.col(best_down) * lifted.col(best_down).transpose();
        }
    }

    KhachiyanState st;
    st.weights = std::move(w);
    st.center = Point::Zero(d);
    for (int i = 0; i < n; ++i) st.center += st.weights[i] * pts[i];
    st.covariance = Mat::Zero(d, d);
    for (int i = 0; i < n; ++i)
        st.covariance += st.weights[i] * pts[i] * pts[i].transpose();
    st.covariance -= st.center * st.center.transpose();
    st.iterations = iter;
    return st;
}

inline void check_affine_rank(const std::vector<Point>& pts, int d) {
    if (static_cast<int>(pts.size()) < d + 1)
        throw DegenerateHullError("mvee: need at least d+1 points");
    Mat m(d, pts.size() - 1);
    for (size_t i = 1; i < pts.size(); ++i) m.col(static_cast<int>(i - 1)) = pts[i] - pts[0];
    Eigen::JacobiSVD<Mat> svd(m);
    const double top = svd.singularValues()[0];
    if (svd.singularValues().minCoeff() <= 1e-10 * std::max(top, 1.0) || svd.rank() < d)
        throw DegenerateHullError("mvee: degenerate hull (points are affinely dependent)");
}

inline Ellipsoid ellipsoid_from_state(const KhachiyanState& st, const std::vector<Point>& pts) {
    const int d = static_cast<int>(st.center.size());
    Eigen::LDLT<Mat> cov(st.covariance);
    if (cov.info() != Eigen::Success)
        throw DegenerateHullError("mvee: degenerate hull (flat covariance)");
    Mat shape = cov.solve(Mat::Identity(d, d)) / d;
    Ellipsoid trial(st.center, shape);
    double m_max = 0.0;
    for (const auto& p : pts) m_max = std::max(m_max, trial.mahalanobis(p));
    return trial.scaled(m_max);
}

}  // namespace detail

/// Minimum-volume enclosing ellipsoid of a finite point set. The result
/// contains every input point and its volume is within a (1+tol) factor of
/// the true MVEE volume.
inline Ellipsoid mvee_of_points(const std::vector<Point>& pts, double tol) {
    if (pts.empty()) throw PreconditionError("mvee_of_points: empty point set");
    const int d = static_cast<int>(pts[0].size());
    detail::check_affine_rank(pts, d);
    const double delta_stop = tol / (2.0 * (d + 1));
    const auto st = detail::khachiyan_weights(pts, delta_stop);
    return detail::ellipsoid_from_state(st, pts);
}

// ---------------------------------------------------------------------------
// Oracle-driven coreset construction

struct CoresetPointSet {
    std::vector<Point> points;
    double eps = 0.0;
};

/// Crude seed coreset: the 2d extreme points of the obstacle along d
/// greedily-built mutually orthogonal directions. The first direction is the
/// first canonical axis unless an orthogonal rotation is supplied.
inline CoresetPointSet approx_mve_coreset(const MembershipOracle& oracle, double eps,
                                          const Point& p, double t_max,
                                          const std::optional<Mat>& rotation = std::nullopt,
                                          const RaySearchOptions& ray_opt = {}) {
    const int d = oracle.dim();
    CoresetPointSet out;
    out.eps = eps;

    Mat span(d, 0);  // orthonormalized difference directions
    auto next_orthogonal = [&]() -> Vec {
        for (int k = 0; k < d; ++k) {
            Vec cand = rotation ? Vec(rotation->col(k)) : Vec(Vec::Unit(d, k));
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j < span.cols(); ++j) cand -= span.col(j) * span.col(j).dot(cand);
            const double n = cand.norm();
            if (n > 1e-8) return cand / n;
        }
        throw Error("approx_mve_coreset: no direction orthogonal to the span");
    };

    while (span.cols() < d) {
        const Vec x = next_orthogonal();
        const FarthestResult fwd = farthest(oracle, eps, Direction(x), p, t_max, ray_opt);
        const FarthestResult bwd = farthest(oracle, eps, Direction(-x), p, t_max, ray_opt);
        const double width = fwd.support_value + bwd.support_value;
        if (width < eps)
            throw DegenerateObstacleError("approx_mve_coreset: obstacle width below eps", x);
        out.points.push_back(fwd.point);
        out.points.push_back(bwd.point);

        Vec diff = bwd.point - fwd.point;
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < span.cols(); ++j) diff -= span.col(j) * span.col(j).dot(diff);
        const double n = diff.norm();
        if (n <= 1e-12)
            throw DegenerateObstacleError("approx_mve_coreset: difference vector did not grow the span", x);
        span.conservativeResize(Eigen::NoChange, span.cols() + 1);
        span.col(span.cols() - 1) = diff / n;
    }
    return out;
}

/// Sign-pattern families for the relaxed farthest-point search. The 2^d
/// diagonal patterns realize the l1 objective exactly (max ||x||_1 =
/// max_s s.x over s in {-1,+1}^d); the sparse patterns (one or two nonzero
/// signs) sharpen the relaxation and are used to confirm a halting decision.
enum class SignPatterns { kDiagonals, kSparse, kAll };

/// Best obstacle point under the l1 Mahalanobis relaxation: for every sign
/// vector s the linear objective (L^T s).x is maximized with `farthest`, and
/// the candidate of largest Mahalanobis distance is returned (never smaller
/// than the pure-l1 winner, so the sqrt(d) guarantee carries over).
inline Point mahalanobis_farthest(const MembershipOracle& oracle, const Ellipsoid& E, double eps,
                                  const Point& p_seed, double t_max,
                                  const RaySearchOptions& ray_opt = {},
                                  SignPatterns pattern_set = SignPatterns::kAll) {
    const int d = oracle.dim();
    std::vector<Vec> patterns;
    if (pattern_set != SignPatterns::kSparse) {
        for (int mask = 0; mask < (1 << d); ++mask) {
            Vec s(d);
            for (int i = 0; i < d; ++i) s[i] = (mask & (1 << i)) ? 1.0 : -1.0;
            patterns.push_back(std::move(s));
        }
    }
    if (pattern_set != SignPatterns::kDiagonals) {
        for (int i = 0; i < d; ++i) {
            patterns.push_back(Vec::Unit(d, i));
            patterns.push_back(-Vec::Unit(d, i));
        }
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                for (const double si : {1.0, -1.0})
                    for (const double sj : {1.0, -1.0}) {
                        Vec s = Vec::Zero(d);
                        s[i] = si;
                        s[j] = sj;
                        if (d > 2) patterns.push_back(std::move(s));
                    }
    }

    Point best;
    double best_score = -1.0;
    for (const Vec& s : patterns) {
        const Vec dir = E.factor().transpose() * s;
        const FarthestResult fr = farthest(oracle, eps, Direction(dir), p_seed, t_max, ray_opt);
        const double score = E.mahalanobis(fr.point);
        bool take = score > best_score + 1e-12;
        if (!take && score > best_score - 1e-12 && best.size() > 0) {
            for (int i = 0; i < d; ++i) {
                if (fr.point[i] < best[i] - 1e-15) {
                    take = true;
                    break;
                }
                if (fr.point[i] > best[i] + 1e-15) break;
            }
        }
        if (take) {
            best_score = std::max(best_score, score);
            best = fr.point;
        }
    }
    return best;
}

struct StepRow {
    double kappa = 0.0;
    double epsilon = 0.0;
    double beta = 0.0;     // 0 on the halting row
    double log_det = 0.0;  // log det of the weighted scatter before the step
};

struct StepTrace {
    std::vector<StepRow> rows;
    bool converged = false;
    double final_epsilon = 0.0;
    double final_log_det = 0.0;
    int iteration_cap = 0;

    /// Ellipsoid volume corresponding to a trace row's log_det.
    static double volume_from_log_det(double log_det, int d) {
        return unit_ball_volume(d) * std::pow(static_cast<double>(d), d / 2.0) *
               std::exp(0.5 * log_det);
    }
};

struct MveCoresetResult {
    CoresetPointSet coreset;
    Ellipsoid ellipsoid;
    StepTrace trace;
};

inline int mve_coreset_iteration_cap(int d, double eps) {
    return std::max(64, static_cast<int>(std::ceil(8.0 * d * (1.0 / eps + std::log(d + 1.0)))));
}

/// Oracle-driven eps-coreset for the MVEE of the obstacle containing p.
/// Seeds with the crude 2d-point coreset, then repeatedly adds the point
/// returned by the relaxed Mahalanobis-farthest search, updating the trial
/// ellipsoid by the rank-one convex-combination step with
///   kappa = d*||L(q-c)||^2 + 1,  eps_i = kappa/(d+1) - 1,  beta = eps_i/(kappa-1),
/// halting once eps_i <= (1+eps)^(2/(d+1)) - 1.
inline MveCoresetResult mve_coreset(const MembershipOracle& oracle, double eps, const Point& p,
                                    double t_max,
                                    const std::optional<Mat>& seed_rotation = std::nullopt,
                                    const RaySearchOptions& ray_opt = {}) {
    const int d = oracle.dim();
    CoresetPointSet coreset = approx_mve_coreset(oracle, eps, p, t_max, seed_rotation, ray_opt);

    detail::check_affine_rank(coreset.points, d);
    detail::KhachiyanState st = detail::khachiyan_weights(coreset.points, (eps / 4.0) / (2.0 * (d + 1)));
    std::vector<Point>& S = coreset.points;
    Vec w = st.weights;

    auto rebuild = [&](Point& c, Mat& cov) {
        c = Point::Zero(d);
        for (size_t i = 0; i < S.size(); ++i) c += w[static_cast<int>(i)] * S[i];
        cov = Mat::Zero(d, d);
        for (size_t i = 0; i < S.size(); ++i)
            cov += w[static_cast<int>(i)] * S[i] * S[i].transpose();
        cov -= c * c.transpose();
    };

    const double halt_threshold = std::pow(1.0 + eps, 2.0 / (d + 1)) - 1.0;
    const int cap = mve_coreset_iteration_cap(d, eps);

    StepTrace trace;
    trace.iteration_cap = cap;

    Point c;
    Mat cov;
    std::optional<Ellipsoid> E;
    for (int iter = 0; iter < cap; ++iter) {
        rebuild(c, cov);
        Eigen::LDLT<Mat> cov_ldlt(cov);
        if (cov_ldlt.info() != Eigen::Success)
            throw DegenerateHullError("mve_coreset: flat trial covariance");
        E.emplace(c, Mat(cov_ldlt.solve(Mat::Identity(d, d)) / d));
        const double log_det = std::log(cov.determinant());

        Point q = mahalanobis_farthest(oracle, *E, eps, p, t_max, ray_opt,
                                       SignPatterns::kDiagonals);
        double mahal = E->mahalanobis(q);
        double kappa = d * mahal * mahal + 1.0;
        double eps_i = kappa / (d + 1.0) - 1.0;
        if (eps_i <= halt_threshold) {
            // Halting candidate: confirm against the sparse patterns at a
            // sharper search tolerance, since the halting margin is finer
            // than the eps the outer searches run at.
            const Point q2 = mahalanobis_farthest(oracle, *E, eps / 2.0, p, t_max, ray_opt,
                                                  SignPatterns::kSparse);
            if (E->mahalanobis(q2) > mahal) {
                q = q2;
                mahal = E->mahalanobis(q);
                kappa = d * mahal * mahal + 1.0;
                eps_i = kappa / (d + 1.0) - 1.0;
            }
        }
        if (!oracle.query(q))
            throw OracleInconsistencyError("mve_coreset: candidate coreset point queries false");

        trace.final_epsilon = eps_i;
        trace.final_log_det = log_det;

        if (eps_i <= halt_threshold) {
            trace.rows.push_back({kappa, eps_i, 0.0, log_det});
            trace.converged = true;
            break;
        }
        const double beta = eps_i / (kappa - 1.0);
        trace.rows.push_back({kappa, eps_i, beta, log_det});

        w *= (1.0 - beta);
        w.conservativeResize(w.size() + 1);
        w[w.size() - 1] = beta;
        S.push_back(q);
    }

    // Containment rescale plus the boundary slack of the ray searches: each
    // coreset point sits up to eps (Euclidean) inside the true support point.
    rebuild(c, cov);
    Eigen::LDLT<Mat> cov_ldlt(cov);
    if (cov_ldlt.info() != Eigen::Success)
        throw DegenerateHullError("mve_coreset: flat final covariance");
    Ellipsoid trial(c, cov_ldlt.solve(Mat::Identity(d, d)) / d);
    double m_max = 0.0;
    for (const auto& s : S) m_max = std::max(m_max, trial.mahalanobis(s));
    Eigen::JacobiSVD<Mat> svd(trial.factor());
    const double sigma_max = svd.singularValues()[0];
    Ellipsoid final_e = trial.scaled(m_max + eps * sigma_max);

    return {std::move(coreset), std::move(final_e), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Cross-polytope enclosure

/// Convex hull of the 2d axis endpoints of the sqrt(d)-expanded ellipsoid.
/// Membership is ||frame*(x - center)||_1 <= sqrt(d).
struct CrossPolytope {
    Point center;
    std::vector<Point> vertices;  // +a1, -a1, +a2, -a2, ...
    Mat frame;
    Mat frame_inv;

    int dim() const { return static_cast<int>(center.size()); }

    bool contains(const Point& x, double tol = 1e-9) const {
        return (frame * (x - center)).lpNorm<1>() <= std::sqrt(static_cast<double>(dim())) + tol;
    }

    /// Membership of the polytope shrunk by `factor` about its center.
    bool contains_shrunk(const Point& x, double factor, double tol = 1e-9) const {
        return (frame * (x - center)).lpNorm<1>() <=
               factor * std::sqrt(static_cast<double>(dim())) + tol;
    }

    /// 2^d facet halfspaces n.x <= b covering exactly conv(vertices).
    std::vector<std::pair<Vec, double>> facet_halfspaces() const {
        const int d = dim();
        const double r = std::sqrt(static_cast<double>(d));
        std::vector<std::pair<Vec, double>> out;
        out.reserve(1 << d);
        for (int mask = 0; mask < (1 << d); ++mask) {
            Vec s(d);
            for (int i = 0; i < d; ++i) s[i] = (mask & (1 << i)) ? 1.0 : -1.0;
            Vec n = frame.transpose() * s;
            out.emplace_back(n, r + n.dot(center));
        }
        return out;
    }

    double volume() const {
        const int d = dim();
        const double r = std::sqrt(static_cast<double>(d));
        double fact = 1.0;
        for (int i = 2; i <= d; ++i) fact *= i;
        return std::pow(2.0 * r, d) / fact / std::abs(frame.determinant());
    }
};

inline CrossPolytope cross_polytope_bound(const Ellipsoid& E) {
    const int d = E.dim();
    const auto [axes, semi] = E.principal_axes();
    const double r = std::sqrt(static_cast<double>(d));

    CrossPolytope cp;
    cp.center = E.center();
    Mat w(d, d);  // orthogonal: columns L*a_i
    for (int i = 0; i < d; ++i) {
        const Vec a = axes.col(i) * semi[i];
        cp.vertices.push_back(cp.center + r * a);
        cp.vertices.push_back(cp.center - r * a);
        w.col(i) = E.factor() * a;
    }
    cp.frame = w.transpose() * E.factor();
    cp.frame_inv = cp.frame.inverse();
    return cp;
}

}  // namespace obscout
