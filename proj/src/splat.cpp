#include "igslam/splat.hpp"

#include <cmath>

namespace igs {

Mat3 Gaussian3D::covariance() const {
    const Mat3 r = rotation.normalized().toRotationMatrix();
    const Vec3 s = log_scale.array().exp();
    const Mat3 m = r * s.asDiagonal();
    return m * m.transpose();
}

void GaussianCloud::remove_if_flagged(const std::vector<uint8_t>& flags) {
    size_t keep = 0;
    for (size_t i = 0; i < gaussians_.size(); ++i) {
        if (flags[i]) continue;
        if (keep != i) {
            gaussians_[keep] = gaussians_[i];
            ids_[keep] = ids_[i];
        }
        ++keep;
    }
    gaussians_.resize(keep);
    ids_.resize(keep);
}

double evaluate_gaussian(const ProjectedGaussian& g, const Vec2& pixel) {
    const Vec2 d = pixel - g.mean2d;
    const double det = g.cov2d(0, 0) * g.cov2d(1, 1) - g.cov2d(0, 1) * g.cov2d(1, 0);
    const double inv_det = 1.0 / det;
    const double maha = inv_det * (g.cov2d(1, 1) * d.x() * d.x() - 2.0 * g.cov2d(0, 1) * d.x() * d.y() +
                                   g.cov2d(0, 0) * d.y() * d.y());
    return std::exp(-0.5 * maha);
}

std::optional<ProjectedGaussian> project_gaussian(const Gaussian3D& g, const SE3Pose& t_cw,
                                                  const PinholeCamera& cam) {
    const Vec3 mean_cam = t_cw * g.position;
    if (mean_cam.z() <= kNearPlane) return std::nullopt;

    ProjectedGaussian out;
    out.depth = mean_cam.z();
    out.mean2d = Vec2(cam.fx * mean_cam.x() / mean_cam.z() + cam.cx,
                      cam.fy * mean_cam.y() / mean_cam.z() + cam.cy);

    const Eigen::Matrix<double, 2, 3> j = projection_jacobian(cam, mean_cam);
    const Mat3 r_cw = t_cw.rotation_matrix();
    const Eigen::Matrix<double, 2, 3> a = j * r_cw;
    out.cov2d = a * g.covariance() * a.transpose();
    out.cov2d(0, 0) += kCov2dLowPass;
    out.cov2d(1, 1) += kCov2dLowPass;

    // Cull against the image rect grown by kCutoffSigma standard deviations
    // along the footprint's major axis.
    const double half_trace = 0.5 * (out.cov2d(0, 0) + out.cov2d(1, 1));
    const double det = out.cov2d(0, 0) * out.cov2d(1, 1) - out.cov2d(0, 1) * out.cov2d(1, 0);
    const double disc = std::sqrt(std::max(half_trace * half_trace - det, 0.0));
    const double radius = kCutoffSigma * std::sqrt(std::max(half_trace + disc, 0.0));
    if (out.mean2d.x() < -radius || out.mean2d.x() > cam.width - 1 + radius ||
        out.mean2d.y() < -radius || out.mean2d.y() > cam.height - 1 + radius) {
        return std::nullopt;
    }

    out.opacity = g.opacity();
    out.color = g.color;
    return out;
}

}  // namespace igs
