#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "igslam/camera.hpp"
#include "igslam/se3.hpp"

namespace igs {

// One splat. Covariance is R S S^T R^T with S = diag(exp(log_scale)); opacity
// is sigmoid(opacity_logit). Color is a plain RGB triple in [0, 1].
struct Gaussian3D {
    Vec3 position = Vec3::Zero();
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    Vec3 log_scale = Vec3::Zero();
    double opacity_logit = 0.0;
    Vec3 color = Vec3::Zero();

    Mat3 covariance() const;
    double opacity() const { return 1.0 / (1.0 + std::exp(-opacity_logit)); }

    bool operator==(const Gaussian3D& o) const {
        return (position.array() == o.position.array()).all() &&
               (rotation.coeffs().array() == o.rotation.coeffs().array()).all() &&
               (log_scale.array() == o.log_scale.array()).all() &&
               opacity_logit == o.opacity_logit && (color.array() == o.color.array()).all();
    }
};

// Structure-of-record storage with persistent ids. Ids break depth-sort ties
// so rendering is invariant under permutation of the storage order.
class GaussianCloud {
public:
    void add(const Gaussian3D& g) { add(g, next_id_++); }
    void add(const Gaussian3D& g, uint64_t id) {
        gaussians_.push_back(g);
        ids_.push_back(id);
        next_id_ = std::max(next_id_, id + 1);
    }

    size_t size() const { return gaussians_.size(); }
    bool empty() const { return gaussians_.empty(); }

    Gaussian3D& operator[](size_t i) { return gaussians_[i]; }
    const Gaussian3D& operator[](size_t i) const { return gaussians_[i]; }
    uint64_t id(size_t i) const { return ids_[i]; }

    const std::vector<Gaussian3D>& gaussians() const { return gaussians_; }

    // Removes the flagged records, preserving relative order.
    void remove_if_flagged(const std::vector<uint8_t>& flags);

    bool operator==(const GaussianCloud&) const = default;

private:
    std::vector<Gaussian3D> gaussians_;
    std::vector<uint64_t> ids_;
    uint64_t next_id_ = 0;
};

// Image-plane footprint after EWA projection.
struct ProjectedGaussian {
    Vec2 mean2d = Vec2::Zero();
    Eigen::Matrix2d cov2d = Eigen::Matrix2d::Identity();  // includes the low-pass term
    double depth = 0.0;                                   // camera z of the mean
    double opacity = 0.0;
    Vec3 color = Vec3::Zero();
};

constexpr double kNearPlane = 0.01;
constexpr double kCov2dLowPass = 0.3;
// Samples beyond this Mahalanobis radius contribute nothing; tile bucketing
// relies on the same cutoff.
constexpr double kCutoffSigma = 3.0;

// exp(-1/2 (x-mu)^T cov2d^-1 (x-mu)); no cutoff applied here.
double evaluate_gaussian(const ProjectedGaussian& g, const Vec2& pixel);

// EWA projection: cov2d = J R_cw Sigma R_cw^T J^T + lowpass*I. Returns
// nullopt (culled) when camera z <= near plane or the projected mean lies
// outside the image bounds expanded by kCutoffSigma standard deviations.
std::optional<ProjectedGaussian> project_gaussian(const Gaussian3D& g, const SE3Pose& t_cw,
                                                  const PinholeCamera& cam);

}  // namespace igs
