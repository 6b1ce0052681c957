#pragma once

#include <set>
#include <string>
#include <vector>

#include "igslam/config.hpp"
#include "igslam/dataset.hpp"
#include "igslam/evaluation.hpp"
#include "igslam/flow_provider.hpp"
#include "igslam/map_optimizer.hpp"

namespace igs {

struct RunConfig {
    // tracking
    double keyframe_flow_threshold_px = 4.0;
    int local_window = 16;
    int local_radius = 3;
    int global_ba_period = 10;  // keyframes between global BA passes
    double global_proximity_threshold_px = 16.0;
    int local_ba_iterations = 6;
    int global_ba_iterations = 3;
    int solver_downsample = 8;
    double flow_noise_sigma_px = 0.0;
    double min_inv_depth = 1e-4;
    double ba_cost_tolerance = 1e-10;

    MappingConfig mapping;

    enum class Mode { interleaved, concurrent };
    Mode mode = Mode::interleaved;
    uint64_t rng_seed = 7;
    int clip_start_frames = 0;
    int eval_stride = 5;

    std::string dataset_dir;
    std::string dataset_format = "synthetic";
    PinholeCamera tum_intrinsics;  // used when dataset_format == "tum"

    static RunConfig from_config(const Config& cfg);
    Config to_config() const;
};

struct TrajectoryEntry {
    int frame_index = -1;  // index into the clipped frame sequence
    double timestamp = 0.0;
    SE3Pose pose;
};

struct RunResult {
    std::vector<TrajectoryEntry> trajectory;  // one entry per keyframe
    std::set<int> keyframe_frames;            // frame indices that became keyframes
    MapState map;
    EvalReport eval;
};

// Full pipeline: keyframe selection, local DBA per keyframe, global BA every
// `global_ba_period` keyframes and once at the end, incremental mapping with
// state refreshed at each cycle, post-processing, evaluation. When `provider`
// is null a ground-truth flow oracle is built from the dataset (requires
// ground-truth poses and depths).
RunResult run(const Dataset& dataset, const RunConfig& config, FlowProvider* provider = nullptr);

// Renders every `eval_stride`-th frame (skipping mapping keyframes) from its
// ground-truth pose mapped through the Sim(3) fit of the estimated trajectory,
// and reports PSNR/SSIM/Depth-L1 plus the trajectory ATE.
EvalReport evaluate(const GaussianCloud& map, const std::vector<TrajectoryEntry>& trajectory,
                    const std::set<int>& mapping_frames, const Dataset& dataset,
                    const RunConfig& config);

// Trajectory text format: "timestamp tx ty tz qx qy qz qw" per line.
void write_trajectory(const std::string& path, const std::vector<TrajectoryEntry>& trajectory);
std::vector<TrajectoryEntry> read_trajectory(const std::string& path);

// One JSON object per eval frame, then a summary object; one per line.
void write_metrics(const std::string& path, const EvalReport& report);

// Writes trajectory, metrics, map checkpoint, and checkpoint metadata.
void write_run_outputs(const std::string& out_dir, const RunResult& result,
                       const RunConfig& config);

}  // namespace igs
