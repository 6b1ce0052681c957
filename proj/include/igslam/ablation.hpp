#pragma once

#include <deque>

#include "igslam/pipeline.hpp"

namespace igs {

// Mapping-only protocol: keyframes are taken every `keyframe_stride` frames
// with ground-truth poses, optionally noisy depth, and run through the normal
// sliding-window optimizer. Isolates the mapping design choices from tracking.
struct MappingProtocolOptions {
    int keyframe_stride = 4;
    double depth_noise_base = 0.0;  // heteroscedastic sigma scale, 0 = clean
    bool covariance_weighting = true;
    double loss_alpha = 0.5;
    bool decay = true;
    double constant_lr = 1.6e-4;  // used when decay == false
    uint64_t seed = 7;
};

class MappingAblation {
public:
    MappingAblation(const Dataset& dataset, const RunConfig& base,
                    const MappingProtocolOptions& options);

    // Feeds the keyframe stream through sliding-window optimization.
    void run_mapping();

    // Continues post-processing from the current state; callable in chunks.
    void run_postprocess(int iterations);

    EvalReport evaluate() const;
    const MapState& map() const { return map_; }
    long long iterations() const { return map_.global_iteration; }

private:
    const Dataset& dataset_;
    RunConfig config_;
    MappingProtocolOptions options_;
    std::vector<KeyframePacket> packets_;
    std::vector<int> keyframe_indices_;
    std::vector<TrajectoryEntry> trajectory_;
    MapState map_;
    std::mt19937_64 rng_;
};

struct DecayAblationResult {
    double psnr_decay = 0.0;
    double psnr_constant_low = 0.0;   // lr_f
    double psnr_constant_mid = 0.0;   // geometric mean lr
    double psnr_constant_high = 0.0;  // lr_i
};
DecayAblationResult ablate_decay(const Dataset& dataset, const RunConfig& base);

struct DepthLossAblationResult {
    double depth_l1_weighted = 0.0;
    double depth_l1_no_depth = 0.0;
    double depth_l1_raw = 0.0;
    double psnr_weighted = 0.0;
    double psnr_no_depth = 0.0;
    double psnr_raw = 0.0;
};
DepthLossAblationResult ablate_depth_loss(const Dataset& dataset, const RunConfig& base);

struct PostprocessAblationResult {
    double psnr_beta0 = 0.0;
    double psnr_beta500 = 0.0;
    double psnr_beta2000 = 0.0;
};
PostprocessAblationResult ablate_postprocess(const Dataset& dataset, const RunConfig& base);

}  // namespace igs
