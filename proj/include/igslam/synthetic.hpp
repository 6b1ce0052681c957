#pragma once

#include <string>
#include <vector>

#include "igslam/camera.hpp"
#include "igslam/grid.hpp"
#include "igslam/splat.hpp"

namespace igs {

// Deterministic test-scene description. Box scenes approximate a textured
// axis-aligned cube with face-aligned splats and expose the exact ray-cast
// depth as an independent oracle; gaussian scenes are pure splat sets.
struct SceneSpec {
    enum class Geometry { box, gaussians };
    enum class Trajectory { orbit, line, loop };

    Geometry geometry = Geometry::box;
    double box_half_extent = 0.5;
    int splats_per_face_side = 14;
    int random_gaussian_count = 200;

    Trajectory trajectory = Trajectory::orbit;
    double orbit_radius = 2.0;
    double orbit_bob = 0.15;  // vertical motion amplitude
    double line_step = 0.02;
    int frames = 60;
    double fps = 30.0;

    PinholeCamera camera{160.0, 160.0, 79.5, 59.5, 160, 120};
    double depth_scale = 5000.0;  // 16-bit depth quantization
};

struct SyntheticFrame {
    double timestamp = 0.0;
    SE3Pose pose;    // ground-truth camera-to-world
    ImageRGB image;  // quantized to 8 bits
    GridF depth;     // quantized; 0 marks no geometry
};

struct SolverDepth {
    GridF inverse_depth;
    GridU8 valid;
};

struct SyntheticScene {
    SceneSpec spec;
    GaussianCloud splats;  // the generating splat set
    std::vector<SyntheticFrame> frames;

    // Exact ray-cast depth for box scenes (0 where the ray misses); rendered
    // depth for gaussian scenes. Evaluated at the given resolution.
    GridF geometry_depth(int frame_index, int width, int height) const;

    // Ground-truth inverse depth at solver resolution for the flow oracle.
    SolverDepth solver_inverse_depth(int frame_index, int solver_w, int solver_h) const;
};

SyntheticScene generate_scene(const SceneSpec& spec, uint64_t seed);

// Writes manifest.txt plus rgb/ and depth/ PNG directories in the synthetic
// dataset layout understood by load_dataset(dir, "synthetic").
void save_scene(const SyntheticScene& scene, const std::string& dir);

// Exact depth along the pixel ray to an axis-aligned box at the origin;
// 0 when the ray misses. Depth is the camera-frame z of the hit point.
double ray_box_depth(const SE3Pose& pose, const PinholeCamera& cam, double px, double py,
                     double half_extent);

}  // namespace igs
