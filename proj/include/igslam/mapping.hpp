#pragma once

#include <vector>

#include "igslam/camera.hpp"
#include "igslam/grid.hpp"
#include "igslam/rasterizer.hpp"
#include "igslam/se3.hpp"

namespace igs {

// Tracking-to-mapping handoff: full-resolution image, metric depth upsampled
// from solver resolution, the matching depth covariance, and the pose.
struct KeyframePacket {
    int keyframe_id = -1;
    ImageRGB image;
    GridF depth;             // scene units; 0 marks invalid
    GridF depth_covariance;  // >= 0
    SE3Pose pose;            // camera-to-world
};

// One level of the coarse-to-fine pyramid; level 0 is the packet itself.
struct PyramidLevel {
    int level = 0;
    ImageRGB image;
    GridF depth;
    GridF covariance;
};

struct MappingConfig {
    double downsample_factor = 0.8;  // s
    int levels = 3;
    int seed_stride = 128;           // theta
    double loss_alpha = 0.5;         // color/depth mix
    double lr_position_initial = 1.6e-4;
    double lr_position_final = 1.6e-6;
    double lr_decay_tau = 3000;
    double lr_color = 2.5e-3;
    double lr_opacity = 5e-2;
    double lr_log_scale = 5e-3;
    double lr_rotation = 1e-3;
    int window = 8;                  // N keyframes
    int iterations_per_keyframe = 60;
    int densify_interval = 150;
    double densify_grad_threshold = 2e-4;
    double prune_opacity = 0.1;
    int postprocess_iterations = 500;  // beta
    double mask_threshold = 0.2;
    int mask_kernel = 32;
    double seed_opacity = 0.5;
    double depth_loss_eps = 1e-8;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-15;
};

// Pyramid with dims(l) = floor(dims(0) * s^l), bilinear resampling of image,
// depth, and covariance. Throws DegenerateLevel when a dimension floors to 0.
std::vector<PyramidLevel> build_pyramid(const KeyframePacket& packet, double s, int levels);

// Seeding mask: normalize covariance to [0,1] ((all zeros when max == min)),
// maximum-filter with `kernel`, threshold below `threshold`, then majority-
// filter the binary mask with the same kernel.
GridU8 covariance_mask(const GridF& sigma_d, double threshold = 0.2, int kernel = 32);

// Mixed L1 loss and its gradients with respect to the rendered outputs:
//   L = alpha * mean|C - C_hat| + (1-alpha) * mean(|D - D_hat| / (sigma + eps))
// The depth mean runs over pixels with valid depth and alpha_acc > 0.5; the
// subgradient at zero is zero. With alpha == 1 the depth term is skipped.
struct MappingLoss {
    double value = 0.0;
    double color_term = 0.0;
    double depth_term = 0.0;
    ImageRGB grad_color;
    GridF grad_depth;
};
MappingLoss mapping_loss(const RenderedFrame& rendered, const ImageRGB& target_image,
                         const GridF& target_depth, const GridF& depth_covariance, double alpha,
                         double eps = 1e-8);

// Log-linear decay lr(t) = exp((1-t) ln lr_i + t ln lr_f), t = min(n/tau, 1).
double lr_schedule(double n, double lr_i, double lr_f, double tau);

}  // namespace igs
