#include <doctest.h>

#include <random>

#include "igslam/geometry.hpp"

using namespace igs;

namespace {
PinholeCamera solver_cam() { return {20.0, 20.0, 9.5, 7.5, 20, 16}; }
}  // namespace

TEST_CASE("reproject_field with identity relative pose is the identity map") {
    const PinholeCamera cam = solver_cam();
    InverseDepthMap depth(cam.width, cam.height, 0.7);
    const SE3Pose g = SE3Pose::exp((Vec6() << 0.1, -0.2, 0.3, 0.05, -0.02, 0.1).finished());
    const ReprojectionField field = reproject_field(g, g, cam, depth);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            REQUIRE(field.valid(x, y) == 1);
            CHECK(field.coords(x, y).x() == doctest::Approx(x).epsilon(1e-12));
            CHECK(field.coords(x, y).y() == doctest::Approx(y).epsilon(1e-12));
        }
    }
}

// Brute-force per-pixel oracle: unproject, transform, project with the module's
// scalar primitives.
TEST_CASE("reproject_field matches per-pixel projection oracle under z-translation") {
    const PinholeCamera cam = solver_cam();
    InverseDepthMap depth(cam.width, cam.height, 0.5);  // planar depth 2
    const SE3Pose g_i;  // identity
    const SE3Pose g_j(Eigen::Quaterniond::Identity(), Vec3(0, 0, 0.4));  // camera moved forward

    const ReprojectionField field = reproject_field(g_i, g_j, cam, depth);
    const SE3Pose g_ij = g_j.inverse() * g_i;
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const Vec3 p = g_ij * unproject(cam, Vec2(x, y), depth.values(x, y));
            REQUIRE(field.valid(x, y) == 1);
            CHECK((field.coords(x, y) - project(cam, p)).norm() < 1e-12);
            // Forward motion towards a fronto-parallel plane expands the
            // field away from the principal point.
            const double r_before = std::hypot(x - cam.cx, y - cam.cy);
            const double r_after = std::hypot(field.coords(x, y).x() - cam.cx,
                                              field.coords(x, y).y() - cam.cy);
            if (r_before > 1e-9) CHECK(r_after > r_before);
        }
    }
}

TEST_CASE("reproject_field flags points behind the camera") {
    const PinholeCamera cam = solver_cam();
    InverseDepthMap depth(cam.width, cam.height, 1.0);
    // Move the target camera 2 units forward; depth-1 points fall behind it.
    const SE3Pose g_j(Eigen::Quaterniond::Identity(), Vec3(0, 0, 2.0));
    const ReprojectionField field = reproject_field(SE3Pose(), g_j, cam, depth);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) CHECK(field.valid(x, y) == 0);
}

TEST_CASE("bilinear resize of a constant grid stays constant") {
    GridF g(13, 9, 3.25);
    const GridF small = resize_bilinear(g, 7, 5);
    for (size_t i = 0; i < small.size(); ++i) CHECK(small[i] == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("upsample_depth inverts after interpolation") {
    GridF inv(4, 4, 0.5);
    const GridF up = upsample_depth(inv, 8, 8);
    for (size_t i = 0; i < up.size(); ++i) CHECK(up[i] == doctest::Approx(2.0).epsilon(1e-12));
}
