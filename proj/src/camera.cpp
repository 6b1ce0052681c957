#include "igslam/camera.hpp"

#include "igslam/errors.hpp"

namespace igs {

Vec2 project(const PinholeCamera& cam, const Vec3& p) {
    if (p.z() <= 0.0) throw NonPositiveDepth();
    return {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy};
}

Vec3 unproject(const PinholeCamera& cam, const Vec2& pixel, double inv_depth) {
    if (inv_depth <= 0.0) throw NonPositiveInverseDepth();
    const Vec3 ray((pixel.x() - cam.cx) / cam.fx, (pixel.y() - cam.cy) / cam.fy, 1.0);
    return ray / inv_depth;
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const PinholeCamera& cam, const Vec3& p) {
    const double iz = 1.0 / p.z();
    Eigen::Matrix<double, 2, 3> j;
    j << cam.fx * iz, 0.0, -cam.fx * p.x() * iz * iz,
         0.0, cam.fy * iz, -cam.fy * p.y() * iz * iz;
    return j;
}

PinholeCamera scaled_camera(const PinholeCamera& cam, int new_width, int new_height) {
    const double sx = static_cast<double>(new_width) / cam.width;
    const double sy = static_cast<double>(new_height) / cam.height;
    PinholeCamera out;
    out.fx = cam.fx * sx;
    out.fy = cam.fy * sy;
    out.cx = (cam.cx + 0.5) * sx - 0.5;
    out.cy = (cam.cy + 0.5) * sy - 0.5;
    out.width = new_width;
    out.height = new_height;
    return out;
}

}  // namespace igs
