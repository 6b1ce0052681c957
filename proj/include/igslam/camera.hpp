#pragma once

#include "igslam/se3.hpp"

namespace igs {

// Pinhole intrinsics in pixel units.
struct PinholeCamera {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;

    bool valid() const {
        return fx > 0 && fy > 0 && cx > 0 && cx < width && cy > 0 && cy < height;
    }
};

// u = fx*x/z + cx, v = fy*y/z + cy. Throws NonPositiveDepth for z <= 0.
Vec2 project(const PinholeCamera& cam, const Vec3& point_cam);

// Returns ((u-cx)/fx, (v-cy)/fy, 1) / inv_depth. Throws NonPositiveInverseDepth.
Vec3 unproject(const PinholeCamera& cam, const Vec2& pixel, double inv_depth);

// 2x3 Jacobian of project() at point_cam (z > 0 assumed).
Eigen::Matrix<double, 2, 3> projection_jacobian(const PinholeCamera& cam, const Vec3& point_cam);

// Intrinsics rescaled to new dimensions under the align-centers convention
// (pixel centers of the two rasters coincide at the corners of the field of view).
PinholeCamera scaled_camera(const PinholeCamera& cam, int new_width, int new_height);

}  // namespace igs
