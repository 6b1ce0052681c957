#pragma once

#include "igslam/camera.hpp"
#include "igslam/grid.hpp"
#include "igslam/se3.hpp"

namespace igs {

// Per-pixel inverse depth with its marginal variance, at solver resolution.
struct InverseDepthMap {
    GridF values;      // 1 / scene-units, all > 0
    GridF covariance;  // (1 / scene-units)^2, all >= 0

    InverseDepthMap() = default;
    InverseDepthMap(int w, int h, double inv_depth = 1.0, double cov = 0.0)
        : values(w, h, inv_depth), covariance(w, h, cov) {}

    int width() const { return values.width(); }
    int height() const { return values.height(); }
};

// Reprojected pixel coordinates plus a per-pixel validity flag (0 where the
// transformed point lands behind the camera).
struct ReprojectionField {
    GridV2 coords;
    GridU8 valid;

    int width() const { return coords.width(); }
    int height() const { return coords.height(); }
};

// p_ij(p) = project(g_j^-1 * g_i * unproject(p, d_i(p))) per pixel.
ReprojectionField reproject_field(const SE3Pose& g_i, const SE3Pose& g_j,
                                  const PinholeCamera& cam, const InverseDepthMap& depth_i);

// Identity pixel grid (the coordinates of each pixel center).
GridV2 identity_grid(int width, int height);

// Depth map in scene units at full resolution: bilinear upsample of inverse
// depth, then invert. Covariance is upsampled as-is.
GridF upsample_depth(const GridF& inv_depth, int full_w, int full_h);
GridF upsample_covariance(const GridF& cov, int full_w, int full_h);

}  // namespace igs
