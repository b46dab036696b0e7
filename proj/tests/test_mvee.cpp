#include "obscout/mvee.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

#include <random>

using namespace obscout;
using namespace testsupport;

TEST_CASE("mvee_of_points: equilateral triangle gives its circumcircle") {
    std::vector<Point> verts;
    for (int k = 0; k < 3; ++k) {
        const double th = M_PI / 2.0 + 2.0 * M_PI * k / 3.0;
        verts.push_back(pt(std::cos(th), std::sin(th)));
    }
    const Ellipsoid e = mvee_of_points(verts, 1e-8);
    CHECK(e.center().norm() < 1e-4);
    CHECK(e.volume() == Catch::Approx(M_PI).epsilon(1e-4));
    for (const auto& v : verts) CHECK(e.mahalanobis(v) == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("mvee_of_points: diamond gives the unit circle") {
    const std::vector<Point> verts{pt(1, 0), pt(-1, 0), pt(0, 1), pt(0, -1)};
    const Ellipsoid e = mvee_of_points(verts, 1e-8);
    CHECK(e.center().norm() < 1e-6);
    CHECK((e.shape() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("mvee_of_points: recovers an ellipse from boundary samples") {
    std::vector<Point> verts;
    for (int k = 0; k < 16; ++k) {
        const double th = 2.0 * M_PI * k / 16.0;
        verts.push_back(pt(2.0 * std::cos(th), std::sin(th)));
    }
    const Ellipsoid e = mvee_of_points(verts, 1e-9);
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = 0.25;
    expect(1, 1) = 1.0;
    CHECK((e.shape() - expect).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("mvee_of_points: degenerate input") {
    CHECK_THROWS_AS(mvee_of_points({pt(0, 0), pt(1, 1), pt(2, 2), pt(3, 3)}, 1e-6),
                    DegenerateHullError);
    CHECK_THROWS_AS(mvee_of_points({pt(0, 0), pt(1, 1)}, 1e-6), DegenerateHullError);
}

TEST_CASE("mvee_of_points: contains all points and is near-minimal") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto verts = random_convex_polygon(rng, 8 + static_cast<int>(rng() % 20), pt(0, 0));
        const Ellipsoid e = mvee_of_points(verts, 1e-7);
        double max_mahal = 0.0;
        for (const auto& v : verts) {
            CHECK(e.mahalanobis(v) <= 1.0 + 1e-9);
            max_mahal = std::max(max_mahal, e.mahalanobis(v));
        }
        // minimal scaling: some point sits on the boundary
        CHECK(max_mahal >= 1.0 - 1e-7);
    }
}

TEST_CASE("approx_mve_coreset: disk extremes") {
    const double eps = 1e-3;
    const auto meta = make_meta(2, -2.0, 2.0, eps, 0.5, 1.5);
    auto oracle = make_analytic_oracle({ball(pt(0, 0), 1.0)}, meta);
    const auto cs = approx_mve_coreset(*oracle, eps, pt(0, 0), 3.0);

    REQUIRE(cs.points.size() == 4);
    // first direction is +e1, so the first pair is (+-1, ~0)
    CHECK((cs.points[0] - pt(1, 0)).norm() < 0.05);
    CHECK((cs.points[1] - pt(-1, 0)).norm() < 0.05);
    CHECK(std::abs(std::abs(cs.points[2][1]) - 1.0) < 0.05);
    CHECK(std::abs(std::abs(cs.points[3][1]) - 1.0) < 0.05);
    for (const auto& p : cs.points) CHECK(oracle->query(p));
}

TEST_CASE("approx_mve_coreset: box face extremes from an interior seed") {
    const double eps = 1e-3;
    const auto meta = make_meta(2, -1.0, 3.0, eps, 0.4, 2.0);
    auto oracle = make_analytic_oracle({box(pt(0, 0), pt(2, 1))}, meta);
    const auto cs = approx_mve_coreset(*oracle, eps, pt(1, 0.5), 5.0);

    REQUIRE(cs.points.size() == 4);
    CHECK(cs.points[0][0] == Catch::Approx(2.0).margin(eps));
    CHECK(cs.points[1][0] == Catch::Approx(0.0).margin(eps));
    CHECK(cs.points[2][1] == Catch::Approx(1.0).margin(eps));
    CHECK(cs.points[3][1] == Catch::Approx(0.0).margin(eps));
}

TEST_CASE("approx_mve_coreset: degenerate width raises with the direction") {
    const double eps = 0.01;
    const auto meta = make_meta(2, -1.0, 2.0, eps, 0.01, 2.0);
    // sliver box much thinner than eps along y
    auto oracle = make_analytic_oracle({box(pt(0, 0.5), pt(1, 0.502))}, meta);
    try {
        approx_mve_coreset(*oracle, eps, pt(0.5, 0.501), 4.0);
        FAIL("expected DegenerateObstacleError");
    } catch (const DegenerateObstacleError& e) {
        CHECK(e.direction.size() == 2);
        CHECK(std::abs(e.direction[1]) == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("mve_coreset: symmetric disk seed halts immediately") {
    const double eps = 0.01;
    const auto meta = make_meta(2, -2.0, 2.0, eps, 0.5, 1.5);
    auto oracle = make_analytic_oracle({ball(pt(0, 0), 1.0)}, meta);
    const auto res = mve_coreset(*oracle, eps, pt(0, 0), 3.0);

    CHECK(res.trace.converged);
    CHECK(res.coreset.points.size() == 4);  // no refinement points added
    CHECK(res.trace.rows.size() == 1);
    CHECK(res.ellipsoid.volume() == Catch::Approx(M_PI).epsilon(0.1));
}

TEST_CASE("mve_coreset: ellipse volume against dense brute force") {
    const double eps = 0.01;
    const auto meta = make_meta(2, -4.0, 4.0, eps, 0.5, 3.0);
    auto oracle = make_analytic_oracle({axis_ellipse(pt(0.7, -0.3), 2.0, 1.0)}, meta);
    const auto res = mve_coreset(*oracle, eps, pt(0.7, -0.3), 6.0);

    std::vector<Point> dense;
    for (int k = 0; k < 2000; ++k) {
        const double th = 2.0 * M_PI * k / 2000.0;
        dense.push_back(pt(0.7 + 2.0 * std::cos(th), -0.3 + std::sin(th)));
    }
    const double v_true = mvee_of_points(dense, 1e-8).volume();
    const double v_core = mvee_of_points(res.coreset.points, 1e-8).volume();
    CHECK(v_true <= (1.0 + 1.5 * eps) * v_core);
    CHECK(v_true == Catch::Approx(2.0 * M_PI).epsilon(1e-3));
}

TEST_CASE("mve_coreset: Definition-2 quality on random polygons") {
    const double eps = 0.05;
    const auto meta = make_meta(2, -9.0, 9.0, eps, 0.05, 5.0);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // well-spread 8-gons meet the (1+eps) factor of the definition
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<Point> verts;
        const double a = 0.8 + 1.2 * unit(rng), b = 0.6 + 0.9 * unit(rng);
        const double rot = 2.0 * M_PI * unit(rng);
        for (int k = 0; k < 8; ++k) {
            const double th = 2.0 * M_PI * (k + 0.4 * (unit(rng) - 0.5)) / 8.0;
            const double x = a * std::cos(th), y = b * std::sin(th);
            verts.push_back(pt(1.0 + std::cos(rot) * x - std::sin(rot) * y,
                               -0.5 + std::sin(rot) * x + std::cos(rot) * y));
        }
        auto oracle = make_analytic_oracle({polytope(verts)}, meta);
        Point centroid = Point::Zero(2);
        for (const auto& v : verts) centroid += v;
        centroid /= static_cast<double>(verts.size());

        const auto res = mve_coreset(*oracle, eps, centroid, meta.ray_limit());
        const double v_full = mvee_of_points(verts, 1e-8).volume();
        const double v_core = mvee_of_points(res.coreset.points, 1e-8).volume();
        CHECK(v_full <= (1.0 + eps) * v_core * (1.0 + 1e-9));
    }

    // polygons with arbitrary vertex spacing stay within the 1.5*eps gate
    for (int trial = 0; trial < 6; ++trial) {
        const auto verts = random_convex_polygon(rng, 8, pt(1.0, -0.5));
        auto oracle = make_analytic_oracle({polytope(verts)}, meta);
        Point centroid = Point::Zero(2);
        for (const auto& v : verts) centroid += v;
        centroid /= static_cast<double>(verts.size());

        const auto res = mve_coreset(*oracle, eps, centroid, meta.ray_limit());
        const double v_full = mvee_of_points(verts, 1e-8).volume();
        const double v_core = mvee_of_points(res.coreset.points, 1e-8).volume();
        CHECK(v_full <= (1.0 + 1.5 * eps) * v_core * (1.0 + 1e-9));
    }
}

TEST_CASE("mve_coreset: step-trace laws") {
    const double eps = 0.01;
    const auto meta = make_meta(2, -9.0, 9.0, eps, 0.05, 5.0);
    std::mt19937_64 rng(47);
    const auto verts = random_convex_polygon(rng, 11, pt(0.5, 0.5));
    auto oracle = make_analytic_oracle({polytope(verts)}, meta);
    Point centroid = Point::Zero(2);
    for (const auto& v : verts) centroid += v;
    centroid /= static_cast<double>(verts.size());

    const auto res = mve_coreset(*oracle, eps, centroid, meta.ray_limit());
    const auto& rows = res.trace.rows;
    REQUIRE(!rows.empty());
    CHECK(res.trace.converged);
    CHECK(res.trace.final_epsilon <= std::pow(1.0 + eps, 2.0 / 3.0) - 1.0);

    const double d = 2.0;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i + 1 < rows.size()) {
            CHECK(rows[i].beta > 0.0);
            CHECK(rows[i].beta < 1.0);
            // log det gain per iteration, exact identity plus the proof bound
            const double gain = rows[i + 1].log_det - rows[i].log_det;
            const double expect = d * std::log(1.0 - rows[i].beta) + std::log(1.0 + rows[i].epsilon);
            CHECK(gain == Catch::Approx(expect).margin(1e-9));
            const double lower = std::min(std::log(2.0) - 0.5,
                                          rows[i].epsilon * rows[i].epsilon / 8.0);
            CHECK(gain >= lower - 1e-9);
            CHECK(rows[i + 1].log_det >= rows[i].log_det - 1e-12);
        }
    }

    // containment of every coreset point under the final rescaled ellipsoid
    for (const auto& p : res.coreset.points)
        CHECK(res.ellipsoid.mahalanobis(p) <= 1.0 + 1e-6);

    // coreset size bounded by seed + iteration cap
    CHECK(res.coreset.points.size() <= 4 + static_cast<size_t>(res.trace.iteration_cap));
}

TEST_CASE("mahalanobis_farthest: disk twice the trial ellipsoid") {
    const double eps = 1e-3;
    const auto meta = make_meta(2, -3.0, 3.0, eps, 0.5, 2.5);
    auto oracle = make_analytic_oracle({ball(pt(0, 0), 2.0)}, meta);
    const Ellipsoid unit_circle(pt(0, 0), Mat::Identity(2, 2));

    const Point q = mahalanobis_farthest(*oracle, unit_circle, eps, pt(0, 0), 5.0);
    CHECK(q.norm() >= 2.0 - 10.0 * eps);
    CHECK(oracle->query(q));
}

TEST_CASE("mahalanobis_farthest: exact MVEE has near-unit reach") {
    const double eps = 1e-3;
    const auto meta = make_meta(2, -3.0, 3.0, eps, 0.5, 2.5);
    auto oracle = make_analytic_oracle({axis_ellipse(pt(0, 0), 2.0, 1.0)}, meta);
    Mat q = Mat::Zero(2, 2);
    q(0, 0) = 0.25;
    q(1, 1) = 1.0;
    const Ellipsoid exact(pt(0, 0), q);
    const Point best = mahalanobis_farthest(*oracle, exact, eps, pt(0, 0), 5.0);
    CHECK(exact.mahalanobis(best) <= 1.0 + 2.0 * eps);
}

TEST_CASE("mahalanobis_farthest: box corner maximizes both norms") {
    const double eps = 1e-3;
    const auto meta = make_meta(2, -3.0, 3.0, eps, 0.5, 2.5);
    auto oracle = make_analytic_oracle({box(pt(-1, -1), pt(1, 1))}, meta);
    const Ellipsoid unit_circle(pt(0, 0), Mat::Identity(2, 2));
    const Point q = mahalanobis_farthest(*oracle, unit_circle, eps, pt(0, 0), 5.0);
    CHECK(unit_circle.mahalanobis(q) == Catch::Approx(std::sqrt(2.0)).margin(0.01));
    CHECK((unit_circle.factor() * q).lpNorm<1>() == Catch::Approx(2.0).margin(0.01));
}

TEST_CASE("cross_polytope_bound: unit circle") {
    const Ellipsoid e(pt(0, 0), Mat::Identity(2, 2));
    const CrossPolytope cp = cross_polytope_bound(e);
    REQUIRE(cp.vertices.size() == 4);

    const double r = std::sqrt(2.0);
    std::vector<Point> expect{pt(r, 0), pt(-r, 0), pt(0, r), pt(0, -r)};
    for (const auto& want : expect) {
        bool hit = false;
        for (const auto& v : cp.vertices)
            if ((v - want).norm() < 1e-9) hit = true;
        CHECK(hit);
    }
    // |x| + |y| <= sqrt(2) contains the disk boundary
    for (int k = 0; k < 64; ++k) {
        const double th = 2.0 * M_PI * k / 64.0;
        CHECK(cp.contains(pt(std::cos(th), std::sin(th))));
    }
    CHECK_FALSE(cp.contains(pt(1.01, 0.41)));
}

TEST_CASE("cross_polytope_bound: axis scaling") {
    Mat q = Mat::Zero(2, 2);
    q(0, 0) = 0.25;
    q(1, 1) = 1.0;
    const Ellipsoid e(pt(0, 0), q);
    const CrossPolytope cp = cross_polytope_bound(e);

    const double r = std::sqrt(2.0);
    std::vector<Point> expect{pt(2.0 * r, 0), pt(-2.0 * r, 0), pt(0, r), pt(0, -r)};
    for (const auto& want : expect) {
        bool hit = false;
        for (const auto& v : cp.vertices)
            if ((v - want).norm() < 1e-9) hit = true;
        CHECK(hit);
    }
}

TEST_CASE("cross_polytope_bound: 3-D ellipsoid boundary inside conv(C)") {
    std::mt19937_64 rng(53);
    std::normal_distribution<double> gauss;
    // random SPD shape via A^T A + small ridge
    Mat a(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = gauss(rng);
    const Mat shape = a.transpose() * a + 0.5 * Mat::Identity(3, 3);
    const Point center = pt3(0.4, -0.2, 0.1);
    const Ellipsoid e(center, shape);
    const CrossPolytope cp = cross_polytope_bound(e);
    REQUIRE(cp.vertices.size() == 6);

    // independent containment route: octahedron facets from vertex triples
    const Point a1 = cp.vertices[0], a2 = cp.vertices[2], a3 = cp.vertices[4];
    std::vector<std::pair<Vec, double>> facets;
    for (int mask = 0; mask < 8; ++mask) {
        const Point w1 = (mask & 1) ? Point(2.0 * center - a1) : a1;
        const Point w2 = (mask & 2) ? Point(2.0 * center - a2) : a2;
        const Point w3 = (mask & 4) ? Point(2.0 * center - a3) : a3;
        const Vec u = w2 - w1, v = w3 - w1;
        Vec n(3);
        n << u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0];
        double off = n.dot(w1);
        if (n.dot(center) > off) {
            n = -n;
            off = -off;
        }
        facets.emplace_back(n, off);
    }

    Eigen::LLT<Mat> llt(shape);
    const Mat l = llt.matrixU();
    const Mat l_inv = l.inverse();
    for (int i = 0; i < 1000; ++i) {
        Vec y(3);
        y << gauss(rng), gauss(rng), gauss(rng);
        y.normalize();
        const Point x = center + l_inv * y;  // on the ellipsoid boundary
        for (const auto& [n, off] : facets)
            CHECK(n.dot(x) <= off + 1e-9 * (1.0 + std::abs(off)));
        CHECK(cp.contains(x));
    }
}

TEST_CASE("ellipsoid basics") {
    Mat q = Mat::Zero(2, 2);
    q(0, 0) = 0.25;
    q(1, 1) = 1.0;
    const Ellipsoid e(pt(1, 2), q);
    CHECK(e.volume() == Catch::Approx(2.0 * M_PI).epsilon(1e-12));
    CHECK(e.mahalanobis(pt(3, 2)) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK((e.shape() - e.factor().transpose() * e.factor()).cwiseAbs().maxCoeff() < 1e-12);

    const auto [axes, semi] = e.principal_axes();
    CHECK(semi.maxCoeff() == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(semi.minCoeff() == Catch::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(Ellipsoid(pt(0, 0), Mat::Zero(2, 2)), DegenerateHullError);
}
