#include <cmath>

#include "igslam/rasterizer.hpp"
#include "rasterizer_detail.hpp"

namespace igs {

using detail::Footprint;
using detail::ProjectionSet;

namespace {

// Image-space gradients of one Gaussian, accumulated over pixels.
struct ScreenGrads {
    Vec2 d_mean2d = Vec2::Zero();
    Eigen::Matrix2d d_cov2d = Eigen::Matrix2d::Zero();
    double d_depth = 0.0;
    double d_opacity = 0.0;  // post-sigmoid opacity
    Vec3 d_color = Vec3::Zero();
    bool touched = false;
};

// Chain rule from screen-space quantities back to the Gaussian parameters.
// Repeats the projection forward math to get the intermediates.
GaussianGrads chain_to_parameters(const Gaussian3D& g, const SE3Pose& t_cw, const PinholeCamera& cam,
                                  const ScreenGrads& sg) {
    GaussianGrads out;
    out.color = sg.d_color;

    const double opacity = g.opacity();
    out.opacity_logit = sg.d_opacity * opacity * (1.0 - opacity);

    const Mat3 r_cw = t_cw.rotation_matrix();
    const Vec3 mean_cam = t_cw * g.position;
    const double x = mean_cam.x(), y = mean_cam.y(), z = mean_cam.z();
    const double iz = 1.0 / z, iz2 = iz * iz, iz3 = iz2 * iz;

    Eigen::Matrix<double, 2, 3> j;
    j << cam.fx * iz, 0.0, -cam.fx * x * iz2,
         0.0, cam.fy * iz, -cam.fy * y * iz2;

    const double qn = g.rotation.norm();
    const Eigen::Quaterniond q = g.rotation.normalized();
    const Mat3 r_g = q.toRotationMatrix();
    const Vec3 s = g.log_scale.array().exp();
    const Mat3 m = r_g * s.asDiagonal();
    const Mat3 sigma3 = m * m.transpose();

    const Eigen::Matrix<double, 2, 3> a = j * r_cw;

    // cov2d = a sigma3 a^T + lowpass; d_cov2d is symmetric by construction.
    const Mat3 d_sigma3 = a.transpose() * sg.d_cov2d * a;
    const Eigen::Matrix<double, 2, 3> d_a = 2.0 * sg.d_cov2d * a * sigma3;
    const Eigen::Matrix<double, 2, 3> d_j = d_a * r_cw.transpose();

    // mean2d = project(mean_cam); its Jacobian equals j.
    Vec3 d_mean_cam = j.transpose() * sg.d_mean2d;
    // depth output is mean_cam.z directly.
    d_mean_cam.z() += sg.d_depth;
    // j itself depends on mean_cam.
    d_mean_cam.x() += d_j(0, 2) * (-cam.fx * iz2);
    d_mean_cam.y() += d_j(1, 2) * (-cam.fy * iz2);
    d_mean_cam.z() += d_j(0, 0) * (-cam.fx * iz2) + d_j(0, 2) * (2.0 * cam.fx * x * iz3) +
                      d_j(1, 1) * (-cam.fy * iz2) + d_j(1, 2) * (2.0 * cam.fy * y * iz3);

    out.position = r_cw.transpose() * d_mean_cam;

    // sigma3 = m m^T with m = r_g diag(s).
    const Mat3 d_m = (d_sigma3 + d_sigma3.transpose()) * m;
    const Mat3 rt_dm = r_g.transpose() * d_m;
    for (int k = 0; k < 3; ++k) out.log_scale(k) = rt_dm(k, k) * s(k);

    const Mat3 d_r = d_m * s.asDiagonal();
    const double qw = q.w(), qx = q.x(), qy = q.y(), qz = q.z();
    Eigen::Vector4d d_qn;
    d_qn(0) = 2.0 * (-qz * d_r(0, 1) + qy * d_r(0, 2) + qz * d_r(1, 0) - qx * d_r(1, 2) -
                     qy * d_r(2, 0) + qx * d_r(2, 1));
    d_qn(1) = 2.0 * (qy * d_r(0, 1) + qz * d_r(0, 2) + qy * d_r(1, 0) - 2.0 * qx * d_r(1, 1) -
                     qw * d_r(1, 2) + qz * d_r(2, 0) + qw * d_r(2, 1) - 2.0 * qx * d_r(2, 2));
    d_qn(2) = 2.0 * (-2.0 * qy * d_r(0, 0) + qx * d_r(0, 1) + qw * d_r(0, 2) + qx * d_r(1, 0) +
                     qz * d_r(1, 2) - qw * d_r(2, 0) + qz * d_r(2, 1) - 2.0 * qy * d_r(2, 2));
    d_qn(3) = 2.0 * (-2.0 * qz * d_r(0, 0) - qw * d_r(0, 1) + qx * d_r(0, 2) + qw * d_r(1, 0) -
                     2.0 * qz * d_r(1, 1) + qy * d_r(1, 2) + qx * d_r(2, 0) + qy * d_r(2, 1));

    // Through the normalization q_n = q / |q|.
    const Eigen::Vector4d qn_vec(qw, qx, qy, qz);
    out.rotation = (d_qn - qn_vec * qn_vec.dot(d_qn)) / qn;
    return out;
}

}  // namespace

BackwardResult rasterize_backward(const GaussianCloud& cloud, const SE3Pose& t_cw,
                                  const PinholeCamera& cam, const ImageRGB& grad_color,
                                  const GridF& grad_depth) {
    const ProjectionSet set = detail::project_and_bucket(cloud, t_cw, cam);
    const int num_tiles = set.tiles_x * set.tiles_y;

    // Per-tile private accumulators over the tile's bucket entries.
    std::vector<std::vector<ScreenGrads>> tile_grads(num_tiles);

#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < num_tiles; ++t) {
        const auto& bucket = set.tile[t];
        if (bucket.empty()) continue;
        auto& grads = tile_grads[t];
        grads.resize(bucket.size());

        const int px0 = (t % set.tiles_x) * kTileSize;
        const int py0 = (t / set.tiles_x) * kTileSize;
        const int px1 = std::min(px0 + kTileSize, cam.width);
        const int py1 = std::min(py0 + kTileSize, cam.height);

        for (int py = py0; py < py1; ++py) {
            for (int px = px0; px < px1; ++px) {
                const Vec3 gc = grad_color.rgb(px, py);
                const double gd = grad_depth(px, py);
                if (gc.isZero(0.0) && gd == 0.0) continue;

                // First walk: total weighted contribution, for the suffix sums.
                double total = 0.0;
                {
                    double transmittance = 1.0;
                    for (size_t b = 0; b < bucket.size(); ++b) {
                        if (transmittance < kTransmittanceStop) break;
                        const Footprint& f = set.sorted[bucket[b]];
                        const double maha = detail::mahalanobis2(f, px, py);
                        if (maha > kCutoffSigma * kCutoffSigma) continue;
                        double alpha = f.opacity * std::exp(-0.5 * maha);
                        if (alpha < kAlphaMin) continue;
                        alpha = std::min(alpha, kAlphaClamp);
                        total += (gc.dot(f.color) + gd * f.depth) * alpha * transmittance;
                        transmittance *= (1.0 - alpha);
                    }
                }

                // Second walk: per-sample gradients using suffix = total - prefix.
                double transmittance = 1.0;
                double prefix = 0.0;
                for (size_t b = 0; b < bucket.size(); ++b) {
                    if (transmittance < kTransmittanceStop) break;
                    const Footprint& f = set.sorted[bucket[b]];
                    const double maha = detail::mahalanobis2(f, px, py);
                    if (maha > kCutoffSigma * kCutoffSigma) continue;
                    const double gauss = std::exp(-0.5 * maha);
                    const double alpha_raw = f.opacity * gauss;
                    if (alpha_raw < kAlphaMin) continue;
                    const bool clamped = alpha_raw > kAlphaClamp;
                    const double alpha = clamped ? kAlphaClamp : alpha_raw;
                    const double weight = alpha * transmittance;

                    ScreenGrads& g = grads[b];
                    g.touched = true;
                    g.d_color += gc * weight;
                    g.d_depth += gd * weight;

                    const double contrib = (gc.dot(f.color) + gd * f.depth) * weight;
                    prefix += contrib;
                    const double suffix = total - prefix;
                    const double d_alpha =
                        (gc.dot(f.color) + gd * f.depth) * transmittance - suffix / (1.0 - alpha);

                    if (!clamped) {
                        g.d_opacity += d_alpha * gauss;
                        const double d_gauss = d_alpha * f.opacity;
                        // gauss = exp(-maha/2): d/d mean2d = gauss * conic * delta,
                        // d/d cov2d = gauss/2 * (conic delta)(conic delta)^T.
                        const double dx = px - f.mean2d.x();
                        const double dy = py - f.mean2d.y();
                        const Vec2 cd(f.conic_xx * dx + f.conic_xy * dy,
                                      f.conic_xy * dx + f.conic_yy * dy);
                        g.d_mean2d += d_gauss * gauss * cd;
                        g.d_cov2d += (0.5 * d_gauss * gauss) * (cd * cd.transpose());
                    }
                    transmittance *= (1.0 - alpha);
                }
            }
        }
    }

    // Merge in fixed tile order.
    std::vector<ScreenGrads> screen(cloud.size());
    for (int t = 0; t < num_tiles; ++t) {
        const auto& bucket = set.tile[t];
        const auto& grads = tile_grads[t];
        for (size_t b = 0; b < grads.size(); ++b) {
            if (!grads[b].touched) continue;
            ScreenGrads& dst = screen[set.sorted[bucket[b]].cloud_idx];
            dst.d_mean2d += grads[b].d_mean2d;
            dst.d_cov2d += grads[b].d_cov2d;
            dst.d_depth += grads[b].d_depth;
            dst.d_opacity += grads[b].d_opacity;
            dst.d_color += grads[b].d_color;
            dst.touched = true;
        }
    }

    BackwardResult out;
    out.grads.resize(cloud.size());
    out.grad2d_norm.assign(cloud.size(), 0.0);
    out.visible.assign(cloud.size(), 0);
    const int n = static_cast<int>(cloud.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        if (!screen[i].touched) continue;
        out.grads[i] = chain_to_parameters(cloud[i], t_cw, cam, screen[i]);
        out.grad2d_norm[i] = screen[i].d_mean2d.norm();
        out.visible[i] = 1;
    }
    return out;
}

}  // namespace igs
