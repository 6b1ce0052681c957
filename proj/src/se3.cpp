#include "igslam/se3.hpp"

#include <cmath>

namespace igs {

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0, -v.z(), v.y(),
         v.z(), 0, -v.x(),
         -v.y(), v.x(), 0;
    return m;
}

SE3Pose SE3Pose::exp(const Vec6& xi) {
    const Vec3 rho = xi.head<3>();
    const Vec3 phi = xi.tail<3>();
    const double theta2 = phi.squaredNorm();
    const double theta = std::sqrt(theta2);

    const Mat3 hat = skew(phi);
    Mat3 rot;
    Mat3 v_mat;
    if (theta < 1e-8) {
        // 2nd-order Taylor; adequate well below the branch threshold.
        rot = Mat3::Identity() + hat + 0.5 * hat * hat;
        v_mat = Mat3::Identity() + 0.5 * hat + (1.0 / 6.0) * hat * hat;
    } else {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        rot = Mat3::Identity() + (s / theta) * hat + ((1.0 - c) / theta2) * hat * hat;
        v_mat = Mat3::Identity() + ((1.0 - c) / theta2) * hat + ((theta - s) / (theta2 * theta)) * hat * hat;
    }
    return SE3Pose(Eigen::Quaterniond(rot), v_mat * rho);
}

Vec6 SE3Pose::log() const {
    Eigen::AngleAxisd aa(rotation_);
    const Vec3 phi = aa.angle() * aa.axis();
    const double theta2 = phi.squaredNorm();
    const double theta = std::sqrt(theta2);

    const Mat3 hat = skew(phi);
    Mat3 v_inv;
    if (theta < 1e-8) {
        v_inv = Mat3::Identity() - 0.5 * hat + (1.0 / 12.0) * hat * hat;
    } else {
        const double half = 0.5 * theta;
        const double cot = std::cos(half) / std::sin(half);
        v_inv = Mat3::Identity() - 0.5 * hat + ((1.0 - half * cot) / theta2) * hat * hat;
    }
    Vec6 xi;
    xi.head<3>() = v_inv * translation_;
    xi.tail<3>() = phi;
    return xi;
}

double SE3Pose::rotation_angle() const {
    return Eigen::AngleAxisd(rotation_).angle();
}

}  // namespace igs
