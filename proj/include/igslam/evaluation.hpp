#pragma once

#include <optional>
#include <vector>

#include "igslam/grid.hpp"
#include "igslam/se3.hpp"

namespace igs {

struct FrameMetrics {
    int frame_index = -1;
    double timestamp = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    std::optional<double> depth_l1;
};

struct EvalReport {
    std::vector<FrameMetrics> frames;
    double mean_psnr_db = 0.0;
    double mean_ssim = 0.0;
    std::optional<double> mean_depth_l1;
    std::optional<double> ate_rmse;
};

// PSNR in dB over RGB in [0, 1]; zero-error images report the 99 dB cap.
double psnr_db(const ImageRGB& a, const ImageRGB& b);

// Mean SSIM, 11x11 Gaussian window (sigma 1.5), standard constants, averaged
// over channels. Windows are clipped at the borders with renormalized weights.
double ssim(const ImageRGB& a, const ImageRGB& b);

// Mean |a - b| over pixels where the reference depth is valid (> 0).
double depth_l1(const GridF& rendered, const GridF& reference);

// Closed-form similarity fit "gt -> est" over paired positions.
struct Sim3 {
    double scale = 1.0;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
    // Camera-to-world pose mapped into the target frame (orientation rotated,
    // center transported; scale acts on the scene, not the rotation).
    SE3Pose apply(const SE3Pose& pose) const {
        return SE3Pose(Eigen::Quaterniond(rotation * pose.rotation_matrix()), apply(pose.translation()));
    }
};
Sim3 fit_sim3(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

// RMSE of translational residuals after Sim(3) alignment (alignment optional
// for diagnostics). Throws TooFewPoses for fewer than 3 pairs.
double ate_rmse(const std::vector<SE3Pose>& estimated, const std::vector<SE3Pose>& ground_truth,
                bool align = true);

}  // namespace igs
