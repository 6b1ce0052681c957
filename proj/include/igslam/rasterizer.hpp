#pragma once

#include "igslam/grid.hpp"
#include "igslam/splat.hpp"

namespace igs {

constexpr int kTileSize = 16;
constexpr double kAlphaClamp = 0.99;
constexpr double kAlphaMin = 1.0 / 255.0;
constexpr double kTransmittanceStop = 1e-4;

// Alpha-blended color, mean-z depth, and accumulated opacity.
struct RenderedFrame {
    ImageRGB color;
    GridF depth;
    GridF alpha_acc;
};

// Per-Gaussian flags filled by the forward pass: 1 when the Gaussian
// contributed at least one sample to the image.
struct RasterizeInfo {
    std::vector<uint8_t> visible;
};

// Tile-bucketed forward pass, parallel over tiles. Gaussians are depth-sorted
// front to back (ties broken by id), blended per pixel with opacity clamped to
// kAlphaClamp, samples beyond kCutoffSigma skipped, and accumulation stopped
// once transmittance drops below kTransmittanceStop. Bit-stable across thread
// counts.
RenderedFrame rasterize(const GaussianCloud& cloud, const SE3Pose& t_cw, const PinholeCamera& cam,
                        RasterizeInfo* info = nullptr);

// Serial reference: every pixel walks the full globally sorted splat list with
// the same blending rule. No tiles, no buckets; kept for tests and benchmarks.
RenderedFrame rasterize_reference(const GaussianCloud& cloud, const SE3Pose& t_cw,
                                  const PinholeCamera& cam);

// Gradients of the blended outputs with respect to one Gaussian's parameters.
struct GaussianGrads {
    Vec3 position = Vec3::Zero();
    Eigen::Vector4d rotation = Eigen::Vector4d::Zero();  // (w, x, y, z)
    Vec3 log_scale = Vec3::Zero();
    double opacity_logit = 0.0;
    Vec3 color = Vec3::Zero();
};

struct BackwardResult {
    std::vector<GaussianGrads> grads;   // per cloud index
    std::vector<double> grad2d_norm;    // |dL/d mean2d|, densification signal
    std::vector<uint8_t> visible;
};

// Analytic backward pass for the outputs of rasterize(). Pose and camera are
// treated as constants. Per-tile private accumulators are merged in fixed
// tile order, so results are bit-stable across thread counts.
BackwardResult rasterize_backward(const GaussianCloud& cloud, const SE3Pose& t_cw,
                                  const PinholeCamera& cam, const ImageRGB& grad_color,
                                  const GridF& grad_depth);

}  // namespace igs
