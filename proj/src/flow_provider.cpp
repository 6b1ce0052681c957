#include "igslam/flow_provider.hpp"

#include <cmath>

#include "igslam/errors.hpp"

namespace igs {

namespace {
constexpr double kConfidenceMin = 1e-6;
constexpr double kConfidenceMax = 1e6;
constexpr double kNoiseEps = 1e-12;
}  // namespace

GroundTruthFlowProvider::GroundTruthFlowProvider(PinholeCamera solver_cam, double noise_sigma_px,
                                                 uint64_t seed)
    : cam_(std::move(solver_cam)), noise_sigma_(noise_sigma_px), seed_(seed) {
    // Inverse noise variance, matching the probabilistic weight in the cost.
    const double raw = 1.0 / (noise_sigma_ * noise_sigma_ + kNoiseEps);
    confidence_ = std::clamp(raw, kConfidenceMin, kConfidenceMax);
}

void GroundTruthFlowProvider::register_frame(int handle, const SE3Pose& pose, GridF inverse_depth,
                                             GridU8 valid) {
    FrameData data;
    data.pose = pose;
    if (valid.empty()) valid = GridU8(inverse_depth.width(), inverse_depth.height(), 1);
    data.depth.values = std::move(inverse_depth);
    data.depth.covariance = GridF(data.depth.values.width(), data.depth.values.height(), 0.0);
    data.valid = std::move(valid);
    frames_[handle] = std::move(data);
}

const GroundTruthFlowProvider::FrameData& GroundTruthFlowProvider::frame(int handle) const {
    auto it = frames_.find(handle);
    if (it == frames_.end()) throw UnknownFrame("unknown frame handle " + std::to_string(handle));
    return it->second;
}

void GroundTruthFlowProvider::revised_targets(int frame_i, int frame_j, GridV2& targets,
                                              GridU8& valid) {
    const FrameData& fi = frame(frame_i);
    const FrameData& fj = frame(frame_j);

    ReprojectionField field = reproject_field(fi.pose, fj.pose, cam_, fi.depth);
    targets = std::move(field.coords);
    valid = std::move(field.valid);
    for (int y = 0; y < valid.height(); ++y)
        for (int x = 0; x < valid.width(); ++x)
            if (!fi.valid(x, y)) valid(x, y) = 0;

    if (noise_sigma_ > 0.0) {
        auto it = noise_cache_.find({frame_i, frame_j});
        if (it == noise_cache_.end()) {
            // Pair-keyed stream so the cache contents do not depend on query order.
            std::seed_seq seq{seed_, static_cast<uint64_t>(frame_i) + 1, static_cast<uint64_t>(frame_j) + 1};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> gauss(0.0, noise_sigma_);
            GridV2 noise(targets.width(), targets.height(), Vec2::Zero());
            for (size_t k = 0; k < noise.size(); ++k) noise[k] = Vec2(gauss(rng), gauss(rng));
            it = noise_cache_.emplace(std::make_pair(frame_i, frame_j), std::move(noise)).first;
        }
        const GridV2& noise = it->second;
        for (size_t k = 0; k < targets.size(); ++k) targets[k] += noise[k];
    }
}

FlowRevision GroundTruthFlowProvider::flow_revision(int frame_i, int frame_j,
                                                    const GridV2& current_reprojection) {
    GridV2 targets;
    GridU8 valid;
    revised_targets(frame_i, frame_j, targets, valid);

    FlowRevision out;
    out.revision = GridV2(targets.width(), targets.height(), Vec2::Zero());
    out.confidence = GridV2(targets.width(), targets.height(), Vec2(confidence_, confidence_));
    out.valid = valid;
    for (int y = 0; y < targets.height(); ++y) {
        for (int x = 0; x < targets.width(); ++x) {
            if (!valid(x, y)) {
                out.confidence(x, y) = Vec2::Zero();
                continue;
            }
            out.revision(x, y) = targets(x, y) - current_reprojection(x, y);
        }
    }
    return out;
}

double GroundTruthFlowProvider::mean_flow(int frame_i, int frame_j) {
    GridV2 targets;
    GridU8 valid;
    revised_targets(frame_i, frame_j, targets, valid);

    double sum = 0.0;
    size_t count = 0;
    for (int y = 0; y < targets.height(); ++y) {
        for (int x = 0; x < targets.width(); ++x) {
            if (!valid(x, y)) continue;
            sum += (targets(x, y) - Vec2(x, y)).norm();
            ++count;
        }
    }
    if (count == 0) throw NoValidPixels();
    return sum / static_cast<double>(count);
}

void ZeroFlowProvider::check(int handle) const {
    if (!frames_.count(handle)) throw UnknownFrame("unknown frame handle " + std::to_string(handle));
}

FlowRevision ZeroFlowProvider::flow_revision(int frame_i, int frame_j,
                                             const GridV2& current_reprojection) {
    check(frame_i);
    check(frame_j);
    const int w = current_reprojection.width();
    const int h = current_reprojection.height();
    FlowRevision out;
    out.revision = GridV2(w, h, Vec2::Zero());
    out.confidence = GridV2(w, h, Vec2::Ones());
    out.valid = GridU8(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.revision(x, y) = Vec2(x, y) - current_reprojection(x, y);
    return out;
}

double ZeroFlowProvider::mean_flow(int frame_i, int frame_j) {
    check(frame_i);
    check(frame_j);
    return 0.0;
}

}  // namespace igs
