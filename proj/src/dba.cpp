#include "igslam/dba.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "igslam/errors.hpp"

namespace igs {

namespace {

std::vector<int> participants(const std::vector<EdgeObservation>& observations) {
    std::set<int> ids;
    for (const auto& e : observations) {
        ids.insert(e.i);
        ids.insert(e.j);
    }
    return {ids.begin(), ids.end()};
}

// Per-edge accumulation buffers, merged serially in edge order so the result
// is independent of the thread count.
struct EdgeAccum {
    Eigen::Matrix<double, 6, 6> b_ii, b_ij, b_jj;
    Vec6 v_i, v_j;
    Eigen::MatrixXd e_i, e_j;  // 6 x (grid pixels), depth grid of keyframe i
    Eigen::VectorXd p, w;      // per source pixel
    double cost = 0.0;

    void resize(int pixels) {
        b_ii.setZero();
        b_ij.setZero();
        b_jj.setZero();
        v_i.setZero();
        v_j.setZero();
        e_i.setZero(6, pixels);
        e_j.setZero(6, pixels);
        p.setZero(pixels);
        w.setZero(pixels);
    }
};

void accumulate_edge(const Keyframe& kf_i, const Keyframe& kf_j, const EdgeObservation& obs,
                     const PinholeCamera& cam, EdgeAccum& acc) {
    const int gw = kf_i.depth.width();
    const int gh = kf_i.depth.height();
    acc.resize(gw * gh);

    const SE3Pose g_ij = kf_j.pose.inverse() * kf_i.pose;
    const Mat3 r_ij = g_ij.rotation_matrix();
    const Vec3 t_ij = g_ij.translation();
    const Mat3 r_i = kf_i.pose.rotation_matrix();
    const Vec3 t_i = kf_i.pose.translation();
    const Mat3 r_j_t = kf_j.pose.rotation_matrix().transpose();

    for (int y = 0; y < gh; ++y) {
        for (int x = 0; x < gw; ++x) {
            if (!obs.valid(x, y)) continue;
            const Vec2 conf = obs.confidence(x, y);
            if (conf.x() <= 0.0 && conf.y() <= 0.0) continue;
            const double d = kf_i.depth.values(x, y);
            if (d <= 0.0) continue;

            const Vec3 ray((x - cam.cx) / cam.fx, (y - cam.cy) / cam.fy, 1.0);
            const Vec3 x_i = ray / d;
            const Vec3 x_j = r_ij * x_i + t_ij;
            if (x_j.z() <= 0.0) continue;
            const Vec3 x_w = r_i * x_i + t_i;

            const Eigen::Matrix<double, 2, 3> j_proj = projection_jacobian(cam, x_j);
            const Vec2 p_prime(cam.fx * x_j.x() / x_j.z() + cam.cx,
                               cam.fy * x_j.y() / x_j.z() + cam.cy);
            const Vec2 r = obs.targets(x, y) - p_prime;

            // d(x_j)/d(xi_i) = R_j^T [ I  -skew(x_w) ]  under left-mult retraction;
            // d(x_j)/d(xi_j) is its negation.
            Eigen::Matrix<double, 3, 6> a;
            a.leftCols<3>() = r_j_t;
            a.rightCols<3>() = -r_j_t * skew(x_w);
            const Eigen::Matrix<double, 2, 6> j_i = j_proj * a;
            const Eigen::Matrix<double, 2, 6> j_j = -j_i;
            const Vec2 j_d = j_proj * (r_ij * (-x_i / d));

            const Eigen::DiagonalMatrix<double, 2> sig(conf.x(), conf.y());
            const Eigen::Matrix<double, 6, 2> j_i_t_s = j_i.transpose() * sig;
            const Eigen::Matrix<double, 6, 2> j_j_t_s = j_j.transpose() * sig;

            const int m = y * gw + x;
            acc.b_ii += j_i_t_s * j_i;
            acc.b_ij += j_i_t_s * j_j;
            acc.b_jj += j_j_t_s * j_j;
            acc.v_i += j_i_t_s * r;
            acc.v_j += j_j_t_s * r;
            acc.e_i.col(m) += j_i_t_s * j_d;
            acc.e_j.col(m) += j_j_t_s * j_d;
            acc.p(m) += j_d.dot(sig * j_d);
            acc.w(m) += j_d.dot(sig * r);
            acc.cost += r.dot(sig * r);
        }
    }
}

}  // namespace

int NormalEquations::slot_of(int kf_id) const {
    for (size_t s = 0; s < kf_ids.size(); ++s)
        if (kf_ids[s] == kf_id) return static_cast<int>(s);
    throw Error("keyframe " + std::to_string(kf_id) + " not in normal equations");
}

std::vector<EdgeObservation> query_edge_observations(const FrameGraph& graph, const EdgeSet& edges,
                                                     const PinholeCamera& solver_cam,
                                                     FlowProvider& provider) {
    std::vector<EdgeObservation> observations;
    observations.reserve(edges.size());
    for (const auto& [i, j] : edges) {
        const Keyframe& kf_i = graph.keyframe(i);
        const Keyframe& kf_j = graph.keyframe(j);
        ReprojectionField field = reproject_field(kf_i.pose, kf_j.pose, solver_cam, kf_i.depth);
        FlowRevision rev = provider.flow_revision(kf_i.feature_handle, kf_j.feature_handle, field.coords);

        EdgeObservation obs;
        obs.i = i;
        obs.j = j;
        obs.confidence = std::move(rev.confidence);
        obs.valid = GridU8(field.width(), field.height(), 0);
        obs.targets = GridV2(field.width(), field.height(), Vec2::Zero());
        for (int y = 0; y < field.height(); ++y) {
            for (int x = 0; x < field.width(); ++x) {
                if (!field.valid(x, y) || !rev.valid(x, y)) continue;
                obs.valid(x, y) = 1;
                obs.targets(x, y) = field.coords(x, y) + rev.revision(x, y);
            }
        }
        observations.push_back(std::move(obs));
    }
    return observations;
}

NormalEquations build_normal_equations(const FrameGraph& graph,
                                       const std::vector<EdgeObservation>& observations,
                                       const PinholeCamera& solver_cam) {
    if (observations.empty()) throw EmptyGraph();

    NormalEquations ne;
    ne.kf_ids = participants(observations);
    const Keyframe& first = graph.keyframe(ne.kf_ids.front());
    ne.grid_w = first.depth.width();
    ne.grid_h = first.depth.height();

    const int k = ne.num_poses();
    const int pixels = ne.grid_w * ne.grid_h;
    const int m = k * pixels;
    ne.C.setZero(6 * k, 6 * k);
    ne.E.setZero(6 * k, m);
    ne.P.setZero(m);
    ne.v.setZero(6 * k);
    ne.w.setZero(m);

    const int num_edges = static_cast<int>(observations.size());
    std::vector<EdgeAccum> accums(num_edges);
#pragma omp parallel for schedule(dynamic)
    for (int e = 0; e < num_edges; ++e) {
        const EdgeObservation& obs = observations[e];
        accumulate_edge(graph.keyframe(obs.i), graph.keyframe(obs.j), obs, solver_cam, accums[e]);
    }

    for (int e = 0; e < num_edges; ++e) {
        const EdgeObservation& obs = observations[e];
        const EdgeAccum& acc = accums[e];
        const int si = ne.slot_of(obs.i);
        const int sj = ne.slot_of(obs.j);
        ne.C.block<6, 6>(6 * si, 6 * si) += acc.b_ii;
        ne.C.block<6, 6>(6 * si, 6 * sj) += acc.b_ij;
        ne.C.block<6, 6>(6 * sj, 6 * si) += acc.b_ij.transpose();
        ne.C.block<6, 6>(6 * sj, 6 * sj) += acc.b_jj;
        ne.v.segment<6>(6 * si) += acc.v_i;
        ne.v.segment<6>(6 * sj) += acc.v_j;
        ne.E.block(6 * si, si * pixels, 6, pixels) += acc.e_i;
        ne.E.block(6 * sj, si * pixels, 6, pixels) += acc.e_j;
        ne.P.segment(si * pixels, pixels) += acc.p;
        ne.w.segment(si * pixels, pixels) += acc.w;
        ne.cost += acc.cost;
    }

    // Gauge: pin the first participating keyframe.
    ne.C.block(0, 0, 6, 6 * k).setZero();
    ne.C.block(0, 0, 6 * k, 6).setZero();
    ne.C.block<6, 6>(0, 0).setIdentity();
    ne.v.head<6>().setZero();
    ne.E.topRows<6>().setZero();

    // Pin depth variables that received no observation.
    ne.depth_observed.assign(m, 1);
    for (int idx = 0; idx < m; ++idx) {
        if (ne.P(idx) == 0.0) {
            ne.P(idx) = 1.0;
            ne.w(idx) = 0.0;
            ne.depth_observed[idx] = 0;
        }
    }
    return ne;
}

NormalEquations residuals_and_jacobians(const FrameGraph& graph, const EdgeSet& edges,
                                        const PinholeCamera& solver_cam, FlowProvider& provider) {
    if (edges.empty()) throw EmptyGraph();
    return build_normal_equations(graph, query_edge_observations(graph, edges, solver_cam, provider),
                                  solver_cam);
}

SchurResult schur_solve(const NormalEquations& ne, double damping) {
    Eigen::MatrixXd c = ne.C;
    c.diagonal() *= (1.0 + damping);
    const Eigen::VectorXd p = ne.P * (1.0 + damping);

    const Eigen::VectorXd p_inv = p.cwiseInverse();
    const Eigen::MatrixXd e_pinv = ne.E * p_inv.asDiagonal();
    const Eigen::MatrixXd s = c - e_pinv * ne.E.transpose();
    const Eigen::VectorXd rhs = ne.v - e_pinv * ne.w;

    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) throw SingularSystem();
    const Eigen::VectorXd dxi = llt.solve(rhs);

    SchurResult out;
    out.depth_updates = p_inv.asDiagonal() * (ne.w - ne.E.transpose() * dxi);
    out.pose_updates.resize(ne.num_poses());
    for (int s_i = 0; s_i < ne.num_poses(); ++s_i) out.pose_updates[s_i] = dxi.segment<6>(6 * s_i);
    return out;
}

double reprojection_cost(const FrameGraph& graph, const std::vector<EdgeObservation>& observations,
                         const PinholeCamera& cam) {
    double cost = 0.0;
    for (const auto& obs : observations) {
        const Keyframe& kf_i = graph.keyframe(obs.i);
        const Keyframe& kf_j = graph.keyframe(obs.j);
        ReprojectionField field = reproject_field(kf_i.pose, kf_j.pose, cam, kf_i.depth);
        for (int y = 0; y < field.height(); ++y) {
            for (int x = 0; x < field.width(); ++x) {
                if (!obs.valid(x, y) || !field.valid(x, y)) continue;
                const Vec2 r = obs.targets(x, y) - field.coords(x, y);
                const Vec2 conf = obs.confidence(x, y);
                cost += conf.x() * r.x() * r.x() + conf.y() * r.y() * r.y();
            }
        }
    }
    return cost;
}

namespace {

struct TrackedState {
    std::vector<SE3Pose> poses;
    std::vector<GridF> depths;
};

TrackedState save_state(const FrameGraph& graph, const std::vector<int>& ids) {
    TrackedState st;
    for (int id : ids) {
        const Keyframe& kf = graph.keyframe(id);
        st.poses.push_back(kf.pose);
        st.depths.push_back(kf.depth.values);
    }
    return st;
}

void restore_state(FrameGraph& graph, const std::vector<int>& ids, const TrackedState& st) {
    for (size_t s = 0; s < ids.size(); ++s) {
        Keyframe& kf = graph.keyframe(ids[s]);
        kf.pose = st.poses[s];
        kf.depth.values = st.depths[s];
    }
}

double mean_inverse_depth(const GridF& values) {
    double sum = 0.0;
    for (size_t i = 0; i < values.size(); ++i) sum += values[i];
    return sum / static_cast<double>(values.size());
}

// Rescale all inverse depths by f and camera centers about the anchor center.
// The reprojection cost is invariant under this transformation.
void apply_scale(FrameGraph& graph, const std::vector<int>& ids, double f) {
    const Vec3 anchor = graph.keyframe(ids.front()).pose.translation();
    for (int id : ids) {
        Keyframe& kf = graph.keyframe(id);
        for (size_t i = 0; i < kf.depth.values.size(); ++i) kf.depth.values[i] *= f;
        kf.pose.translation() = anchor + (kf.pose.translation() - anchor) / f;
    }
}

}  // namespace

BAReport ba_iterate(FrameGraph& graph, const EdgeSet& edges, const PinholeCamera& solver_cam,
                    FlowProvider& provider, int iterations, const BAOptions& opts) {
    if (edges.empty()) throw EmptyGraph();
    if (graph.size() < 2) throw InsufficientKeyframes();

    BAReport report;
    double lambda = opts.lambda_init;
    double current_cost = 0.0;

    std::vector<int> ids;
    {
        std::set<int> s;
        for (const auto& [i, j] : edges) {
            s.insert(i);
            s.insert(j);
        }
        ids.assign(s.begin(), s.end());
    }
    const double anchor_mean = mean_inverse_depth(graph.keyframe(ids.front()).depth.values);

    for (int it = 0; it < iterations; ++it) {
        auto observations = query_edge_observations(graph, edges, solver_cam, provider);
        NormalEquations ne = build_normal_equations(graph, observations, solver_cam);
        current_cost = ne.cost;

        const TrackedState saved = save_state(graph, ids);
        bool accepted = false;
        double step_norm = 0.0;
        for (int attempt = 0; attempt < opts.max_step_retries; ++attempt) {
            const SchurResult sol = schur_solve(ne, lambda);
            for (size_t s = 0; s < ids.size(); ++s) {
                Keyframe& kf = graph.keyframe(ids[s]);
                kf.pose = kf.pose.retract(sol.pose_updates[s]);
                GridF& d = kf.depth.values;
                const int pixels = ne.grid_w * ne.grid_h;
                for (int m = 0; m < pixels; ++m) {
                    d[m] = std::max(d[m] + sol.depth_updates(s * pixels + m), opts.min_inv_depth);
                }
            }
            if (opts.anchor_scale) {
                const double mean = mean_inverse_depth(graph.keyframe(ids.front()).depth.values);
                if (mean > 0.0) apply_scale(graph, ids, anchor_mean / mean);
            }

            const double trial_cost = reprojection_cost(graph, observations, solver_cam);
            if (trial_cost <= current_cost) {
                accepted = true;
                current_cost = trial_cost;
                lambda = std::max(lambda * 0.1, opts.lambda_min);
                for (const auto& u : sol.pose_updates) step_norm += u.squaredNorm();
                step_norm = std::sqrt(step_norm);
                break;
            }
            restore_state(graph, ids, saved);
            lambda = std::min(lambda * 10.0, opts.lambda_max);
        }
        report.pose_updates_norm.push_back(accepted ? step_norm : 0.0);
        ++report.iterations;
    }
    report.final_cost = current_cost;
    report.converged = current_cost <= opts.cost_tolerance;
    return report;
}

DepthCovarianceResult depth_covariance(const NormalEquations& ne) {
    const Eigen::VectorXd p_inv = ne.P.cwiseInverse();
    const Eigen::MatrixXd e_pinv = ne.E * p_inv.asDiagonal();
    const Eigen::MatrixXd s = ne.C - e_pinv * ne.E.transpose();

    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite();

    DepthCovarianceResult out;
    out.sigma_g = llt.solve(Eigen::MatrixXd::Identity(s.rows(), s.cols()));

    const Eigen::MatrixXd sg_e = out.sigma_g * ne.E;  // 6K x M
    const int pixels = ne.grid_w * ne.grid_h;
    out.sigma_d.resize(ne.num_poses());
    for (int slot = 0; slot < ne.num_poses(); ++slot) {
        GridF grid(ne.grid_w, ne.grid_h, 0.0);
        for (int idx = 0; idx < pixels; ++idx) {
            const int m = slot * pixels + idx;
            const double quad = ne.E.col(m).dot(sg_e.col(m));
            grid[idx] = p_inv(m) + p_inv(m) * quad * p_inv(m);
        }
        out.sigma_d[slot] = std::move(grid);
    }
    return out;
}

}  // namespace igs
