#include <doctest.h>

#include <random>

#include "igslam/splat.hpp"

using namespace igs;

namespace {
PinholeCamera cam64() { return {64.0, 64.0, 31.5, 31.5, 64, 64}; }
}  // namespace

TEST_CASE("evaluate_gaussian at the mean is 1") {
    ProjectedGaussian g;
    g.mean2d = Vec2(10, 20);
    g.cov2d = Eigen::Matrix2d::Identity();
    CHECK(evaluate_gaussian(g, Vec2(10, 20)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate_gaussian at unit distance of an isotropic footprint") {
    ProjectedGaussian g;
    g.mean2d = Vec2(0, 0);
    g.cov2d = Eigen::Matrix2d::Identity();
    CHECK(evaluate_gaussian(g, Vec2(1, 0)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("evaluate_gaussian at mahalanobis distance 3") {
    ProjectedGaussian g;
    g.mean2d = Vec2(5, 5);
    g.cov2d = Eigen::Matrix2d::Identity() * 4.0;  // sigma 2
    // Pixel 6 units away: mahalanobis 3.
    CHECK(evaluate_gaussian(g, Vec2(11, 5)) == doctest::Approx(std::exp(-4.5)).epsilon(1e-12));
}

TEST_CASE("project_gaussian on the optical axis is centered and isotropic") {
    Gaussian3D g;
    g.position = Vec3(0, 0, 2);
    g.log_scale = Vec3::Constant(std::log(0.05));
    const auto proj = project_gaussian(g, SE3Pose(), cam64());
    REQUIRE(proj.has_value());
    CHECK(proj->mean2d.x() == doctest::Approx(31.5).epsilon(1e-12));
    CHECK(proj->mean2d.y() == doctest::Approx(31.5).epsilon(1e-12));
    CHECK(proj->depth == doctest::Approx(2.0));
    CHECK(proj->cov2d(0, 0) == doctest::Approx(proj->cov2d(1, 1)).epsilon(1e-12));
    CHECK(std::abs(proj->cov2d(0, 1)) < 1e-12);
}

TEST_CASE("project_gaussian culls behind the near plane") {
    Gaussian3D g;
    g.position = Vec3(0, 0, 0.005);
    CHECK_FALSE(project_gaussian(g, SE3Pose(), cam64()).has_value());
    g.position = Vec3(0, 0, -1.0);
    CHECK_FALSE(project_gaussian(g, SE3Pose(), cam64()).has_value());
}

TEST_CASE("project_gaussian culls far outside the expanded image bounds") {
    Gaussian3D g;
    g.position = Vec3(50.0, 0, 1.0);  // projects kilometers off-screen
    g.log_scale = Vec3::Constant(std::log(0.01));
    CHECK_FALSE(project_gaussian(g, SE3Pose(), cam64()).has_value());
}

// Monte-Carlo pushforward oracle: sample the 3D Gaussian, project the samples
// through the full nonlinear projection, and compare the sample covariance
// with the EWA approximation.
TEST_CASE("cov2d matches the sampled pushforward covariance") {
    std::mt19937_64 rng(55);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const PinholeCamera cam = cam64();

    for (int trial = 0; trial < 10; ++trial) {
        Gaussian3D g;
        g.position = Vec3(0.3 * u(rng), 0.3 * u(rng), 3.0 + u(rng));
        g.rotation = Eigen::Quaterniond(Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng)).normalized());
        g.log_scale = Vec3(std::log(0.02 + 0.02 * std::abs(u(rng))),
                           std::log(0.02 + 0.02 * std::abs(u(rng))),
                           std::log(0.02 + 0.02 * std::abs(u(rng))));

        const auto proj = project_gaussian(g, SE3Pose(), cam);
        REQUIRE(proj.has_value());

        const Mat3 chol = Eigen::LLT<Mat3>(g.covariance()).matrixL();
        const int n = 10000;
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        Vec2 mean = Vec2::Zero();
        std::vector<Vec2> pts(n);
        for (int i = 0; i < n; ++i) {
            const Vec3 sample = g.position + chol * Vec3(gauss(rng), gauss(rng), gauss(rng));
            pts[i] = project(cam, sample);
            mean += pts[i];
        }
        mean /= n;
        for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
        cov /= (n - 1);

        // Compare against the EWA covariance without the low-pass term.
        Eigen::Matrix2d ewa = proj->cov2d;
        ewa(0, 0) -= kCov2dLowPass;
        ewa(1, 1) -= kCov2dLowPass;
        const double rel = (ewa - cov).norm() / cov.norm();
        CHECK(rel < 0.05);
    }
}

TEST_CASE("gaussian cloud removal keeps ids aligned") {
    GaussianCloud cloud;
    for (int i = 0; i < 5; ++i) {
        Gaussian3D g;
        g.position = Vec3(i, 0, 0);
        cloud.add(g);
    }
    cloud.remove_if_flagged({0, 1, 0, 1, 0});
    REQUIRE(cloud.size() == 3);
    CHECK(cloud.id(0) == 0);
    CHECK(cloud.id(1) == 2);
    CHECK(cloud.id(2) == 4);
    CHECK(cloud[1].position.x() == 2.0);
}
