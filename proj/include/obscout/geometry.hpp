#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace obscout {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Point = Vec;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A stated precondition of an operation does not hold for the given input.
struct PreconditionError : Error {
    using Error::Error;
};
struct FileError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
// The exponential probe phase left the workspace without leaving the obstacle.
struct UnboundedObstacleError : Error {
    using Error::Error;
};
struct DegenerateObstacleError : Error {
    DegenerateObstacleError(const std::string& msg, Vec dir)
        : Error(msg), direction(std::move(dir)) {}
    Vec direction;
};
struct DegenerateHullError : Error {
    using Error::Error;
};
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, Point best_point, double stagnation_gap)
        : Error(msg), best(std::move(best_point)), gap(stagnation_gap) {}
    Point best;
    double gap;
};
struct OracleInconsistencyError : Error {
    using Error::Error;
};
struct FreeSpaceExhaustedError : Error {
    using Error::Error;
};

/// Unit vector in R^d. Construction normalizes, so the norm-1 invariant
/// always holds for live objects.
class Direction {
public:
    explicit Direction(Vec v) : v_(std::move(v)) {
        const double n = v_.norm();
        if (!(n > 1e-150)) throw PreconditionError("Direction: zero-length vector");
        v_ /= n;
    }

    static Direction axis(int dim, int i) {
        Vec v = Vec::Zero(dim);
        v[i] = 1.0;
        return Direction(std::move(v));
    }

    const Vec& vec() const { return v_; }
    int dim() const { return static_cast<int>(v_.size()); }
    double dot(const Vec& p) const { return v_.dot(p); }
    Direction operator-() const { return Direction(-v_); }

private:
    Vec v_;
};

/// Axis-aligned box, the planning workspace.
struct AABox {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(const Vec& p) const {
        for (int i = 0; i < dim(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }

    double volume() const { return (hi - lo).prod(); }
    Vec extent() const { return hi - lo; }
    Vec center() const { return 0.5 * (lo + hi); }

    void validate() const {
        if (lo.size() != hi.size() || lo.size() == 0)
            throw PreconditionError("AABox: dimension mismatch");
        if (((hi - lo).array() <= 0.0).any())
            throw PreconditionError("AABox: empty box");
    }
};

/// Volume of the d-dimensional unit ball.
inline double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

/// |det([v1-v0, ..., vd-v0])| / d!
inline double simplex_volume(const std::vector<Point>& verts) {
    const int d = static_cast<int>(verts.size()) - 1;
    Mat m(d, d);
    for (int i = 0; i < d; ++i) m.col(i) = verts[i + 1] - verts[0];
    double fact = 1.0;
    for (int i = 2; i <= d; ++i) fact *= i;
    return std::abs(m.determinant()) / fact;
}

}  // namespace obscout
