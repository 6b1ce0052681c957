#include <doctest.h>

#include <cmath>

#include "igslam/errors.hpp"
#include "igslam/flow_provider.hpp"

using namespace igs;

namespace {
PinholeCamera solver_cam() { return {20.0, 20.0, 9.5, 7.5, 20, 16}; }
}  // namespace

TEST_CASE("ground-truth provider: revision recovers the true reprojection") {
    const PinholeCamera cam = solver_cam();
    GroundTruthFlowProvider provider(cam);
    const SE3Pose g0;
    const SE3Pose g1(Eigen::Quaterniond::Identity(), Vec3(0.1, 0, 0));
    provider.register_frame(0, g0, GridF(cam.width, cam.height, 0.5));
    provider.register_frame(1, g1, GridF(cam.width, cam.height, 0.5));

    // Query with a deliberately wrong current reprojection.
    GridV2 current(cam.width, cam.height, Vec2(1.0, 2.0));
    const FlowRevision rev = provider.flow_revision(0, 1, current);

    InverseDepthMap d(cam.width, cam.height, 0.5);
    const ReprojectionField truth = reproject_field(g0, g1, cam, d);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            REQUIRE(rev.valid(x, y) == 1);
            const Vec2 target = current(x, y) + rev.revision(x, y);
            CHECK((target - truth.coords(x, y)).norm() < 1e-12);
            CHECK(rev.confidence(x, y).x() == doctest::Approx(1.0 / 1e-12).epsilon(1e-9));
        }
    }
}

TEST_CASE("ground-truth provider with noise: statistics match the configured sigma") {
    const PinholeCamera cam = solver_cam();
    const double sigma = 0.5;
    GroundTruthFlowProvider provider(cam, sigma, 99);
    provider.register_frame(0, SE3Pose(), GridF(cam.width, cam.height, 0.5));
    provider.register_frame(1, SE3Pose(Eigen::Quaterniond::Identity(), Vec3(0.05, 0, 0)),
                            GridF(cam.width, cam.height, 0.5));

    InverseDepthMap d(cam.width, cam.height, 0.5);
    const ReprojectionField truth = reproject_field(SE3Pose(), provider.has_frame(1)
                                                                   ? SE3Pose(Eigen::Quaterniond::Identity(), Vec3(0.05, 0, 0))
                                                                   : SE3Pose(),
                                                    cam, d);
    GridV2 current = truth.coords;  // so revision == noise
    const FlowRevision rev = provider.flow_revision(0, 1, current);

    double sum = 0.0, sum2 = 0.0;
    size_t n = 0;
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            for (int a = 0; a < 2; ++a) {
                sum += rev.revision(x, y)(a);
                sum2 += rev.revision(x, y)(a) * rev.revision(x, y)(a);
                ++n;
            }
            CHECK(rev.confidence(x, y).x() == doctest::Approx(1.0 / (sigma * sigma + 1e-12)));
        }
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 5.0 * sigma / std::sqrt(static_cast<double>(n)));
    CHECK(std::sqrt(var) == doctest::Approx(sigma).epsilon(0.15));

    // The noise is cached per pair: a second query returns identical targets.
    const FlowRevision again = provider.flow_revision(0, 1, current);
    for (size_t i = 0; i < rev.revision.size(); ++i)
        CHECK((rev.revision[i] - again.revision[i]).norm() == 0.0);
}

TEST_CASE("provider rejects unknown frames") {
    GroundTruthFlowProvider provider(solver_cam());
    provider.register_frame(0, SE3Pose(), GridF(4, 4, 1.0));
    GridV2 current(4, 4, Vec2::Zero());
    CHECK_THROWS_AS(provider.flow_revision(0, 1, current), UnknownFrame);
    CHECK_THROWS_AS(provider.mean_flow(2, 0), UnknownFrame);

    ZeroFlowProvider zero;
    zero.register_frame(0);
    CHECK_THROWS_AS(zero.flow_revision(0, 1, current), UnknownFrame);
}

TEST_CASE("mean flow of identical frames is zero") {
    const PinholeCamera cam = solver_cam();
    GroundTruthFlowProvider provider(cam);
    provider.register_frame(0, SE3Pose(), GridF(cam.width, cam.height, 1.0));
    provider.register_frame(1, SE3Pose(), GridF(cam.width, cam.height, 1.0));
    CHECK(provider.mean_flow(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mean flow of a uniform 3px x-translation is 3.0") {
    const PinholeCamera cam = solver_cam();
    GroundTruthFlowProvider provider(cam);
    // Fronto-parallel plane at depth 2 (inverse depth 0.5); moving the target
    // camera by tx shifts every reprojection by fx * tx / z = -3 px exactly.
    const double tx = -3.0 * 2.0 / cam.fx;
    provider.register_frame(0, SE3Pose(), GridF(cam.width, cam.height, 0.5));
    provider.register_frame(1, SE3Pose(Eigen::Quaterniond::Identity(), Vec3(tx, 0, 0)),
                            GridF(cam.width, cam.height, 0.5));
    CHECK(provider.mean_flow(0, 1) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("mean flow with no valid pixels throws") {
    const PinholeCamera cam = solver_cam();
    GroundTruthFlowProvider provider(cam);
    provider.register_frame(0, SE3Pose(), GridF(cam.width, cam.height, 1.0),
                            GridU8(cam.width, cam.height, 0));
    provider.register_frame(1, SE3Pose(), GridF(cam.width, cam.height, 1.0));
    CHECK_THROWS_AS(provider.mean_flow(0, 1), NoValidPixels);
}

TEST_CASE("zero provider asserts zero flow") {
    ZeroFlowProvider provider;
    provider.register_frame(0);
    provider.register_frame(1);
    CHECK(provider.mean_flow(0, 1) == 0.0);

    GridV2 current(4, 3, Vec2::Zero());
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) current(x, y) = Vec2(x, y);  // identity reprojection
    const FlowRevision rev = provider.flow_revision(0, 1, current);
    for (size_t i = 0; i < rev.revision.size(); ++i) {
        CHECK(rev.revision[i].norm() == 0.0);  // already at the asserted flow
        CHECK(rev.confidence[i] == Vec2::Ones());
    }
}
