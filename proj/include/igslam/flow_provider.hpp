#pragma once

#include <map>
#include <random>
#include <set>

#include "igslam/geometry.hpp"

namespace igs {

// Per-pixel flow correction and confidence at solver resolution. The revised
// target positions are current_reprojection + revision; confidence is the
// per-axis weight w_ij entering the Mahalanobis norm.
struct FlowRevision {
    GridV2 revision;
    GridV2 confidence;  // >= 0 elementwise
    GridU8 valid;       // pixels the provider can say anything about
};

// Source of flow revisions and confidence weights. Replaces the learned
// recurrent refinement; queried from the tracking thread only.
class FlowProvider {
public:
    virtual ~FlowProvider() = default;

    virtual FlowRevision flow_revision(int frame_i, int frame_j,
                                       const GridV2& current_reprojection) = 0;

    // Mean Euclidean norm of (revised reprojection - identity grid) over
    // valid pixels. Throws NoValidPixels when every pixel is invalid.
    virtual double mean_flow(int frame_i, int frame_j) = 0;
};

// Oracle provider backed by ground-truth poses and inverse depths from a
// synthetic scene. Optional additive Gaussian pixel noise on the revised
// targets; the noise grid is drawn once per ordered frame pair so targets
// stay stationary across solver iterations.
class GroundTruthFlowProvider : public FlowProvider {
public:
    GroundTruthFlowProvider(PinholeCamera solver_cam, double noise_sigma_px = 0.0,
                            uint64_t seed = 0);

    void register_frame(int handle, const SE3Pose& pose, GridF inverse_depth,
                        GridU8 valid = {});
    bool has_frame(int handle) const { return frames_.count(handle) != 0; }

    FlowRevision flow_revision(int frame_i, int frame_j,
                               const GridV2& current_reprojection) override;
    double mean_flow(int frame_i, int frame_j) override;

    double noise_sigma() const { return noise_sigma_; }

private:
    struct FrameData {
        SE3Pose pose;
        InverseDepthMap depth;
        GridU8 valid;
    };

    // True reprojection plus the cached noise for the ordered pair.
    void revised_targets(int frame_i, int frame_j, GridV2& targets, GridU8& valid);
    const FrameData& frame(int handle) const;

    PinholeCamera cam_;
    double noise_sigma_;
    double confidence_;
    uint64_t seed_;
    std::map<int, FrameData> frames_;
    std::map<std::pair<int, int>, GridV2> noise_cache_;
};

// Asserts zero optical flow between every registered pair: the revised
// targets are the identity grid. Carries no scene information, so dense BA
// driven by it plateaus instead of converging; used for degenerate tests.
class ZeroFlowProvider : public FlowProvider {
public:
    void register_frame(int handle) { frames_.insert(handle); }

    FlowRevision flow_revision(int frame_i, int frame_j,
                               const GridV2& current_reprojection) override;
    double mean_flow(int frame_i, int frame_j) override;

private:
    void check(int handle) const;
    std::set<int> frames_;
};

}  // namespace igs
