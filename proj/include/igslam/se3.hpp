#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace igs {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

// Rigid camera-to-world transform stored as unit quaternion + translation.
// Tangent vectors are ordered [translation, rotation].
class SE3Pose {
public:
    SE3Pose() : rotation_(Eigen::Quaterniond::Identity()), translation_(Vec3::Zero()) {}
    SE3Pose(const Eigen::Quaterniond& q, const Vec3& t) : rotation_(q.normalized()), translation_(t) {}

    static SE3Pose identity() { return SE3Pose(); }

    // Left-multiplicative exponential: exp(xi) with xi = [rho, phi].
    static SE3Pose exp(const Vec6& xi);

    // Inverse of exp for small-to-moderate rotations (|angle| < pi).
    Vec6 log() const;

    const Eigen::Quaterniond& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }
    Vec3& translation() { return translation_; }

    Mat3 rotation_matrix() const { return rotation_.toRotationMatrix(); }

    SE3Pose inverse() const {
        const Eigen::Quaterniond qi = rotation_.conjugate();
        return SE3Pose(qi, -(qi * translation_));
    }

    SE3Pose compose(const SE3Pose& other) const {
        return SE3Pose(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
    }
    SE3Pose operator*(const SE3Pose& other) const { return compose(other); }

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    Vec3 operator*(const Vec3& p) const { return apply(p); }

    // G <- exp(delta) * G
    SE3Pose retract(const Vec6& delta) const { return exp(delta).compose(*this); }

    // Angle of the rotation part in radians.
    double rotation_angle() const;

private:
    Eigen::Quaterniond rotation_;
    Vec3 translation_;
};

Mat3 skew(const Vec3& v);

}  // namespace igs
