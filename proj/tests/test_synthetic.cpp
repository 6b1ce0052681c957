#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "igslam/dataset.hpp"
#include "igslam/errors.hpp"
#include "igslam/rasterizer.hpp"
#include "igslam/synthetic.hpp"

using namespace igs;
namespace fs = std::filesystem;

namespace {

SceneSpec small_spec() {
    SceneSpec spec;
    spec.camera = {128.0, 128.0, 63.5, 47.5, 128, 96};
    spec.frames = 8;
    spec.splats_per_face_side = 8;
    return spec;
}

}  // namespace

TEST_CASE("orbit cameras all see the box with bounded depth") {
    SceneSpec spec = small_spec();
    spec.frames = 16;
    const SyntheticScene scene = generate_scene(spec, 1);
    for (int f = 0; f < spec.frames; ++f) {
        int box_pixels = 0;
        double dmin = 1e9, dmax = 0.0;
        const GridF& depth = scene.frames[f].depth;
        for (size_t i = 0; i < depth.size(); ++i) {
            if (depth[i] <= 0.0) continue;
            ++box_pixels;
            dmin = std::min(dmin, depth[i]);
            dmax = std::max(dmax, depth[i]);
        }
        CHECK(box_pixels > 100);
        CHECK(dmin >= 1.0);
        CHECK(dmax <= 3.0);
    }
}

TEST_CASE("generation is deterministic under the seed") {
    const SyntheticScene a = generate_scene(small_spec(), 42);
    const SyntheticScene b = generate_scene(small_spec(), 42);
    REQUIRE(a.frames.size() == b.frames.size());
    CHECK(a.splats == b.splats);
    for (size_t f = 0; f < a.frames.size(); ++f) {
        CHECK(a.frames[f].image == b.frames[f].image);
        CHECK(a.frames[f].depth == b.frames[f].depth);
    }
}

TEST_CASE("loop trajectory closes exactly") {
    SceneSpec spec = small_spec();
    spec.trajectory = SceneSpec::Trajectory::loop;
    const SyntheticScene scene = generate_scene(spec, 2);
    const SE3Pose& first = scene.frames.front().pose;
    const SE3Pose& last = scene.frames.back().pose;
    CHECK((first.translation() - last.translation()).norm() < 1e-12);
    CHECK((first.inverse() * last).rotation_angle() < 1e-12);
}

TEST_CASE("invalid specs are rejected") {
    SceneSpec spec = small_spec();
    spec.frames = 0;
    CHECK_THROWS_AS(generate_scene(spec, 1), InvalidSpec);
    spec = small_spec();
    spec.box_half_extent = -1.0;
    CHECK_THROWS_AS(generate_scene(spec, 1), InvalidSpec);
}

// The splat approximation of the box and the exact ray-cast depth must agree
// where the splat rendering is confident. This bounds the seeding error the
// mapping stage inherits.
TEST_CASE("analytic box depth agrees with the rendered splat depth") {
    const SyntheticScene scene = generate_scene(small_spec(), 3);
    const PinholeCamera& cam = scene.spec.camera;
    for (int f = 0; f < 2; ++f) {
        const RenderedFrame r = rasterize(scene.splats, scene.frames[f].pose.inverse(), cam);
        const GridF& exact = scene.frames[f].depth;
        double worst = 0.0;
        for (int y = 0; y < cam.height; ++y) {
            for (int x = 0; x < cam.width; ++x) {
                if (exact(x, y) <= 0.0 || r.alpha_acc(x, y) < 0.95) continue;
                worst = std::max(worst, std::abs(r.depth(x, y) - exact(x, y)));
            }
        }
        // Documented fixture tolerance: splats are thin but not flat, and
        // blending mixes neighbouring depths near face boundaries.
        CHECK(worst < 0.15);
    }
}

TEST_CASE("solver-resolution inverse depth matches the geometry") {
    const SyntheticScene scene = generate_scene(small_spec(), 4);
    const SolverDepth sd = scene.solver_inverse_depth(0, 16, 12);
    const GridF exact = scene.geometry_depth(0, 16, 12);
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 16; ++x) {
            if (exact(x, y) > 0.0) {
                REQUIRE(sd.valid(x, y) == 1);
                CHECK(sd.inverse_depth(x, y) == doctest::Approx(1.0 / exact(x, y)).epsilon(1e-12));
            } else {
                CHECK(sd.valid(x, y) == 0);
            }
        }
    }
}

TEST_CASE("scene save/load roundtrip: images bit-exact, poses to 1e-9") {
    const fs::path dir = fs::temp_directory_path() / "igslam_test_scene_io";
    fs::remove_all(dir);

    const SyntheticScene scene = generate_scene(small_spec(), 5);
    save_scene(scene, dir.string());
    const Dataset ds = load_dataset(dir.string(), "synthetic");

    REQUIRE(ds.frames.size() == scene.frames.size());
    CHECK(ds.camera.fx == scene.spec.camera.fx);
    for (size_t f = 0; f < ds.frames.size(); ++f) {
        CHECK(ds.frames[f].image == scene.frames[f].image);
        REQUIRE(ds.frames[f].gt_depth.has_value());
        CHECK(*ds.frames[f].gt_depth == scene.frames[f].depth);
        REQUIRE(ds.frames[f].gt_pose.has_value());
        const SE3Pose delta = ds.frames[f].gt_pose->inverse() * scene.frames[f].pose;
        CHECK(delta.translation().norm() < 1e-9);
        CHECK(delta.rotation_angle() < 1e-9);
    }
}

TEST_CASE("synthetic loader flags malformed manifests") {
    const fs::path dir = fs::temp_directory_path() / "igslam_test_scene_bad";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream m(dir / "manifest.txt");
        m << "igslam_synthetic 1\nwidth 4\nheight 4\nnot_a_key 3\n";
    }
    CHECK_THROWS_AS(load_dataset(dir.string(), "synthetic"), MalformedLine);
}
