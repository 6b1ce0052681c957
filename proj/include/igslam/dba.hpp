#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "igslam/flow_provider.hpp"
#include "igslam/frame_graph.hpp"

namespace igs {

// One linearized reprojection constraint between keyframes i (source of the
// depth) and j (target view). Targets are the revised reprojections p*_ij and
// stay fixed while a step against them is evaluated.
struct EdgeObservation {
    int i = -1;
    int j = -1;
    GridV2 targets;
    GridV2 confidence;
    GridU8 valid;
};

// Gauss-Newton normal equations of the weighted reprojection cost, gauge-fixed
// on the first participating keyframe. Depth variables are ordered per
// keyframe slot, row-major over the solver grid.
struct NormalEquations {
    std::vector<int> kf_ids;  // participating keyframes, ascending; slot index = position
    int grid_w = 0;
    int grid_h = 0;

    Eigen::MatrixXd C;  // 6K x 6K block camera matrix, symmetric
    Eigen::MatrixXd E;  // 6K x M camera/depth coupling
    Eigen::VectorXd P;  // M diagonal depth entries, > 0 after pinning
    Eigen::VectorXd v;  // 6K pose residual vector
    Eigen::VectorXd w;  // M depth residual vector

    std::vector<uint8_t> depth_observed;  // per depth variable; 0 = pinned

    double cost = 0.0;  // weighted SSE at the linearization point

    int num_poses() const { return static_cast<int>(kf_ids.size()); }
    int num_depth_vars() const { return static_cast<int>(P.size()); }
    int depth_index(int slot, int x, int y) const { return slot * grid_w * grid_h + y * grid_w + x; }
    int slot_of(int kf_id) const;
};

struct SchurResult {
    std::vector<Vec6> pose_updates;       // per slot
    Eigen::VectorXd depth_updates;        // flat, NormalEquations ordering
};

struct DepthCovarianceResult {
    std::vector<GridF> sigma_d;  // per slot, solver resolution
    Eigen::MatrixXd sigma_g;     // 6K x 6K pose covariance
};

struct BAOptions {
    double lambda_init = 1e-4;
    double lambda_min = 1e-12;
    double lambda_max = 1e8;
    int max_step_retries = 8;
    double min_inv_depth = 1e-4;
    double cost_tolerance = 1e-10;
    bool anchor_scale = true;  // fix mean inverse depth of the first participant
};

struct BAReport {
    int iterations = 0;
    double final_cost = 0.0;
    std::vector<double> pose_updates_norm;  // per iteration, 0 on rejected plateau
    bool converged = false;
};

// Queries the provider at the current state; targets = reprojection + revision.
std::vector<EdgeObservation> query_edge_observations(const FrameGraph& graph, const EdgeSet& edges,
                                                     const PinholeCamera& solver_cam,
                                                     FlowProvider& provider);

// Accumulates J^T S J and J^T S r over all edges and pixels. Invalid pixels
// contribute zero; depth variables with no observation are pinned (P=1, w=0).
// Throws EmptyGraph when there are no edges.
NormalEquations build_normal_equations(const FrameGraph& graph,
                                       const std::vector<EdgeObservation>& observations,
                                       const PinholeCamera& solver_cam);

// Convenience wrapper: query + build at the graph's current state.
NormalEquations residuals_and_jacobians(const FrameGraph& graph, const EdgeSet& edges,
                                        const PinholeCamera& solver_cam, FlowProvider& provider);

// Solves (H + damping*diag(H)) x = b by eliminating the diagonal depth block:
//   (C - E P^-1 E^T) dxi = v - E P^-1 w,   dd = P^-1 (w - E^T dxi)
// Throws SingularSystem when the reduced camera matrix is not positive
// definite beyond gauge fixing.
SchurResult schur_solve(const NormalEquations& ne, double damping);

// Weighted SSE of the current graph state against fixed targets.
double reprojection_cost(const FrameGraph& graph, const std::vector<EdgeObservation>& observations,
                         const PinholeCamera& solver_cam);

// Levenberg-damped Gauss-Newton loop: flow query, linearize, schur_solve,
// retract poses and update clamped inverse depths. Steps that do not decrease
// the cost are rejected and the damping increased.
BAReport ba_iterate(FrameGraph& graph, const EdgeSet& edges, const PinholeCamera& solver_cam,
                    FlowProvider& provider, int iterations, const BAOptions& opts = {});

// Marginal depth covariances from the undamped system:
//   Sigma_d = P^-1 + P^-1 E^T Sigma_G E P^-1,  Sigma_G = (L L^T)^-1
// with L the Cholesky factor of the Schur-reduced camera matrix.
DepthCovarianceResult depth_covariance(const NormalEquations& ne);

}  // namespace igs
