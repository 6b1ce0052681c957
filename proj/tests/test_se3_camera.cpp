#include <doctest.h>

#include <random>

#include "igslam/camera.hpp"
#include "igslam/errors.hpp"
#include "igslam/se3.hpp"

using namespace igs;

namespace {
PinholeCamera test_camera() { return {100.0, 100.0, 50.0, 50.0, 101, 101}; }
}  // namespace

TEST_CASE("se3 exp of zero is identity") {
    const SE3Pose p = SE3Pose::exp(Vec6::Zero());
    CHECK(p.rotation_angle() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.translation().norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("se3 exp(xi) * exp(-xi) is identity within 1e-9") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        Vec6 xi;
        for (int i = 0; i < 6; ++i) xi(i) = u(rng);
        const SE3Pose p = SE3Pose::exp(xi) * SE3Pose::exp(-xi);
        CHECK(p.rotation_angle() < 1e-9);
        CHECK(p.translation().norm() < 1e-9);
    }
}

TEST_CASE("se3 compose with inverse is identity within 1e-9") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        Vec6 xi;
        for (int i = 0; i < 6; ++i) xi(i) = u(rng);
        const SE3Pose p = SE3Pose::exp(xi);
        CHECK(std::abs(p.rotation().norm() - 1.0) < 1e-9);
        const SE3Pose id = p * p.inverse();
        CHECK(id.rotation_angle() < 1e-9);
        CHECK(id.translation().norm() < 1e-9);
    }
}

TEST_CASE("se3 log inverts exp") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 100; ++k) {
        Vec6 xi;
        for (int i = 0; i < 6; ++i) xi(i) = u(rng);
        const Vec6 back = SE3Pose::exp(xi).log();
        CHECK((back - xi).norm() < 1e-9);
    }
}

TEST_CASE("project principal axis") {
    const Vec2 px = project(test_camera(), Vec3(0, 0, 1));
    CHECK(px.x() == doctest::Approx(50.0));
    CHECK(px.y() == doctest::Approx(50.0));
}

TEST_CASE("project pinhole formula") {
    const Vec2 px = project(test_camera(), Vec3(0.5, 0, 1));
    CHECK(px.x() == doctest::Approx(100.0));
    CHECK(px.y() == doctest::Approx(50.0));
}

TEST_CASE("project behind camera throws") {
    CHECK_THROWS_AS(project(test_camera(), Vec3(0, 0, -1)), NonPositiveDepth);
}

TEST_CASE("unproject principal axis") {
    const Vec3 p = unproject(test_camera(), Vec2(50, 50), 0.5);
    CHECK((p - Vec3(0, 0, 2)).norm() < 1e-12);
}

TEST_CASE("unproject off-axis") {
    const Vec3 p = unproject(test_camera(), Vec2(100, 50), 1.0);
    CHECK((p - Vec3(0.5, 0, 1)).norm() < 1e-12);
}

TEST_CASE("unproject non-positive inverse depth throws") {
    CHECK_THROWS_AS(unproject(test_camera(), Vec2(50, 50), 0.0), NonPositiveInverseDepth);
    CHECK_THROWS_AS(unproject(test_camera(), Vec2(50, 50), -1.0), NonPositiveInverseDepth);
}

TEST_CASE("project/unproject roundtrip under 1e-9 for 1e4 random samples") {
    const PinholeCamera cam = test_camera();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, cam.width - 1.0);
    std::uniform_real_distribution<double> uy(0.0, cam.height - 1.0);
    std::uniform_real_distribution<double> ud(0.05, 5.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const Vec2 px(ux(rng), uy(rng));
        const double d = ud(rng);
        const Vec2 back = project(cam, unproject(cam, px, d));
        worst = std::max(worst, (back - px).norm());
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("projection jacobian matches finite differences") {
    const PinholeCamera cam = test_camera();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 50; ++k) {
        const Vec3 p(u(rng), u(rng), 1.0 + std::abs(u(rng)) * 3.0);
        const auto jac = projection_jacobian(cam, p);
        const double h = 1e-6;
        for (int a = 0; a < 3; ++a) {
            Vec3 hi = p, lo = p;
            hi(a) += h;
            lo(a) -= h;
            const Vec2 fd = (project(cam, hi) - project(cam, lo)) / (2.0 * h);
            CHECK((fd - jac.col(a)).norm() < 1e-5 * std::max(1.0, fd.norm()));
        }
    }
}

TEST_CASE("scaled camera keeps the principal ray") {
    const PinholeCamera cam = test_camera();
    const PinholeCamera half = scaled_camera(cam, 50, 50);
    // The world point projecting to the full-res center maps to the same
    // relative position in the scaled raster.
    const Vec3 p(0.1, -0.2, 2.0);
    const Vec2 full = project(cam, p);
    const Vec2 small = project(half, p);
    CHECK(small.x() == doctest::Approx((full.x() + 0.5) * (50.0 / 101.0) - 0.5).epsilon(1e-12));
    CHECK(small.y() == doctest::Approx((full.y() + 0.5) * (50.0 / 101.0) - 0.5).epsilon(1e-12));
}
