#include "igslam/pipeline.hpp"

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "igslam/dba.hpp"
#include "igslam/errors.hpp"
#include "igslam/frame_graph.hpp"
#include "igslam/rasterizer.hpp"
#include "igslam/splat_io.hpp"

namespace igs {

RunConfig RunConfig::from_config(const Config& c) {
    RunConfig r;
    r.keyframe_flow_threshold_px = c.get_double("keyframe_flow_threshold_px", r.keyframe_flow_threshold_px);
    r.local_window = c.get_int("local_window", r.local_window);
    r.local_radius = c.get_int("local_radius", r.local_radius);
    r.global_ba_period = c.get_int("global_ba_period_keyframes", r.global_ba_period);
    r.global_proximity_threshold_px = c.get_double("global_proximity_threshold_px", r.global_proximity_threshold_px);
    r.local_ba_iterations = c.get_int("local_ba_iterations", r.local_ba_iterations);
    r.global_ba_iterations = c.get_int("global_ba_iterations", r.global_ba_iterations);
    r.solver_downsample = c.get_int("solver_downsample", r.solver_downsample);
    r.flow_noise_sigma_px = c.get_double("flow_noise_sigma_px", r.flow_noise_sigma_px);
    r.min_inv_depth = c.get_double("min_inv_depth", r.min_inv_depth);
    r.ba_cost_tolerance = c.get_double("ba_cost_tolerance", r.ba_cost_tolerance);

    MappingConfig& m = r.mapping;
    m.downsample_factor = c.get_double("mapping_downsample_factor", m.downsample_factor);
    m.levels = c.get_int("mapping_pyramid_levels", m.levels);
    m.seed_stride = c.get_int("mapping_seed_stride", m.seed_stride);
    m.loss_alpha = c.get_double("mapping_loss_alpha", m.loss_alpha);
    m.lr_position_initial = c.get_double("mapping_lr_position_initial", m.lr_position_initial);
    m.lr_position_final = c.get_double("mapping_lr_position_final", m.lr_position_final);
    m.lr_decay_tau = c.get_double("mapping_lr_decay_tau", m.lr_decay_tau);
    m.lr_color = c.get_double("mapping_lr_color", m.lr_color);
    m.lr_opacity = c.get_double("mapping_lr_opacity", m.lr_opacity);
    m.lr_log_scale = c.get_double("mapping_lr_log_scale", m.lr_log_scale);
    m.lr_rotation = c.get_double("mapping_lr_rotation", m.lr_rotation);
    m.window = c.get_int("mapping_window", m.window);
    m.iterations_per_keyframe = c.get_int("mapping_iterations_per_keyframe", m.iterations_per_keyframe);
    m.densify_interval = c.get_int("mapping_densify_interval", m.densify_interval);
    m.densify_grad_threshold = c.get_double("mapping_densify_grad_threshold", m.densify_grad_threshold);
    m.prune_opacity = c.get_double("mapping_prune_opacity", m.prune_opacity);
    m.postprocess_iterations = c.get_int("mapping_postprocess_iterations", m.postprocess_iterations);
    m.mask_threshold = c.get_double("mapping_mask_threshold", m.mask_threshold);
    m.mask_kernel = c.get_int("mapping_mask_kernel", m.mask_kernel);

    const std::string mode = c.get_string("mode", "interleaved");
    if (mode == "interleaved") {
        r.mode = Mode::interleaved;
    } else if (mode == "concurrent") {
        r.mode = Mode::concurrent;
    } else {
        throw Error("config: unknown mode " + mode);
    }
    r.rng_seed = c.get_u64("rng_seed", r.rng_seed);
    r.clip_start_frames = c.get_int("clip_start_frames", r.clip_start_frames);
    r.eval_stride = c.get_int("eval_stride", r.eval_stride);
    r.dataset_dir = c.get_string("dataset_dir", r.dataset_dir);
    r.dataset_format = c.get_string("dataset_format", r.dataset_format);

    r.tum_intrinsics.fx = c.get_double("camera_fx", 0.0);
    r.tum_intrinsics.fy = c.get_double("camera_fy", 0.0);
    r.tum_intrinsics.cx = c.get_double("camera_cx", 0.0);
    r.tum_intrinsics.cy = c.get_double("camera_cy", 0.0);
    r.tum_intrinsics.width = c.get_int("camera_width", 0);
    r.tum_intrinsics.height = c.get_int("camera_height", 0);

    if (r.keyframe_flow_threshold_px <= 0.0 || r.global_ba_period < 1 || r.local_window < 2 ||
        r.eval_stride < 1 || r.solver_downsample < 1) {
        throw Error("config: invalid pipeline parameters");
    }
    return r;
}

Config RunConfig::to_config() const {
    Config c;
    c.set_double("keyframe_flow_threshold_px", keyframe_flow_threshold_px);
    c.set_int("local_window", local_window);
    c.set_int("local_radius", local_radius);
    c.set_int("global_ba_period_keyframes", global_ba_period);
    c.set_double("global_proximity_threshold_px", global_proximity_threshold_px);
    c.set_int("local_ba_iterations", local_ba_iterations);
    c.set_int("global_ba_iterations", global_ba_iterations);
    c.set_int("solver_downsample", solver_downsample);
    c.set_double("flow_noise_sigma_px", flow_noise_sigma_px);
    c.set_double("min_inv_depth", min_inv_depth);
    c.set_double("ba_cost_tolerance", ba_cost_tolerance);

    c.set_double("mapping_downsample_factor", mapping.downsample_factor);
    c.set_int("mapping_pyramid_levels", mapping.levels);
    c.set_int("mapping_seed_stride", mapping.seed_stride);
    c.set_double("mapping_loss_alpha", mapping.loss_alpha);
    c.set_double("mapping_lr_position_initial", mapping.lr_position_initial);
    c.set_double("mapping_lr_position_final", mapping.lr_position_final);
    c.set_double("mapping_lr_decay_tau", mapping.lr_decay_tau);
    c.set_double("mapping_lr_color", mapping.lr_color);
    c.set_double("mapping_lr_opacity", mapping.lr_opacity);
    c.set_double("mapping_lr_log_scale", mapping.lr_log_scale);
    c.set_double("mapping_lr_rotation", mapping.lr_rotation);
    c.set_int("mapping_window", mapping.window);
    c.set_int("mapping_iterations_per_keyframe", mapping.iterations_per_keyframe);
    c.set_int("mapping_densify_interval", mapping.densify_interval);
    c.set_double("mapping_densify_grad_threshold", mapping.densify_grad_threshold);
    c.set_double("mapping_prune_opacity", mapping.prune_opacity);
    c.set_int("mapping_postprocess_iterations", mapping.postprocess_iterations);
    c.set_double("mapping_mask_threshold", mapping.mask_threshold);
    c.set_int("mapping_mask_kernel", mapping.mask_kernel);

    c.set("mode", mode == Mode::interleaved ? "interleaved" : "concurrent");
    c.set("rng_seed", std::to_string(rng_seed));
    c.set_int("clip_start_frames", clip_start_frames);
    c.set_int("eval_stride", eval_stride);
    if (!dataset_dir.empty()) c.set("dataset_dir", dataset_dir);
    c.set("dataset_format", dataset_format);
    if (tum_intrinsics.fx > 0.0) {
        c.set_double("camera_fx", tum_intrinsics.fx);
        c.set_double("camera_fy", tum_intrinsics.fy);
        c.set_double("camera_cx", tum_intrinsics.cx);
        c.set_double("camera_cy", tum_intrinsics.cy);
        c.set_int("camera_width", tum_intrinsics.width);
        c.set_int("camera_height", tum_intrinsics.height);
    }
    return c;
}

namespace {

struct SolverDepthSample {
    GridF inverse_depth;
    GridU8 valid;
};

// Nearest-pixel sample of ground-truth depth at solver-grid centers; keeps the
// valid/invalid boundary crisp, unlike bilinear filtering through zeros.
SolverDepthSample sample_solver_depth_impl(const GridF& gt_depth, int sw, int sh) {
    SolverDepthSample out;
    out.inverse_depth = GridF(sw, sh, 1.0);
    out.valid = GridU8(sw, sh, 0);
    const double rx = static_cast<double>(gt_depth.width()) / sw;
    const double ry = static_cast<double>(gt_depth.height()) / sh;
    for (int y = 0; y < sh; ++y) {
        for (int x = 0; x < sw; ++x) {
            const int fx = std::clamp(static_cast<int>(std::lround((x + 0.5) * rx - 0.5)), 0,
                                      gt_depth.width() - 1);
            const int fy = std::clamp(static_cast<int>(std::lround((y + 0.5) * ry - 0.5)), 0,
                                      gt_depth.height() - 1);
            const double d = gt_depth(fx, fy);
            if (d > 0.0) {
                out.inverse_depth(x, y) = 1.0 / d;
                out.valid(x, y) = 1;
            }
        }
    }
    return out;
}

// Tracking side of the pipeline: frame graph, dense BA scheduling, and packet
// construction for the mapping actor.
class Tracker {
public:
    Tracker(const Dataset& dataset, const RunConfig& config, FlowProvider& provider)
        : dataset_(dataset), config_(config), provider_(provider) {
        const PinholeCamera& cam = dataset.camera;
        solver_cam_ = scaled_camera(cam, std::max(1, cam.width / config.solver_downsample),
                                    std::max(1, cam.height / config.solver_downsample));
        ba_opts_.min_inv_depth = config.min_inv_depth;
        ba_opts_.cost_tolerance = config.ba_cost_tolerance;
    }

    const PinholeCamera& solver_camera() const { return solver_cam_; }
    FrameGraph& graph() { return graph_; }

    void add_keyframe(int frame_index) {
        Keyframe kf;
        kf.id = static_cast<int>(graph_.size());
        kf.feature_handle = frame_index;
        kf.image = dataset_.frames[frame_index].image;
        if (graph_.size() == 0) {
            kf.depth = InverseDepthMap(solver_cam_.width, solver_cam_.height, 1.0, 0.0);
        } else {
            const Keyframe& latest = graph_.keyframes().back();
            kf.depth = latest.depth;
            kf.pose = latest.pose;
        }
        graph_.insert(std::move(kf));
        observed_.emplace_back(solver_cam_.width, solver_cam_.height, 0);
    }

    void local_ba() {
        if (graph_.size() < 2) return;
        const EdgeSet edges = graph_.build_local_window(config_.local_window, config_.local_radius);
        ba_iterate(graph_, edges, solver_cam_, provider_, config_.local_ba_iterations, ba_opts_);
        refresh_covariances(edges);
    }

    void global_ba() {
        if (graph_.size() < 2) return;
        const EdgeSet edges = graph_.build_global_graph(
            [this](int i, int j) {
                return provider_.mean_flow(graph_.keyframe(i).feature_handle,
                                           graph_.keyframe(j).feature_handle);
            },
            config_.global_proximity_threshold_px);
        ba_iterate(graph_, edges, solver_cam_, provider_, config_.global_ba_iterations, ba_opts_);
        refresh_covariances(edges);
    }

    // Packets for the given keyframe ids at the current tracking state.
    std::vector<KeyframePacket> make_packets(const std::vector<int>& kf_ids) const {
        std::vector<KeyframePacket> packets;
        packets.reserve(kf_ids.size());
        const int fw = dataset_.camera.width;
        const int fh = dataset_.camera.height;
        for (int id : kf_ids) {
            const Keyframe& kf = graph_.keyframe(id);
            KeyframePacket p;
            p.keyframe_id = id;
            p.image = kf.image;
            p.pose = kf.pose;
            p.depth = upsample_depth(kf.depth.values, fw, fh);
            p.depth_covariance = upsample_covariance(kf.depth.covariance, fw, fh);
            // Zero out depth that tracking never observed.
            const GridU8& obs = observed_[id];
            const double rx = static_cast<double>(solver_cam_.width) / fw;
            const double ry = static_cast<double>(solver_cam_.height) / fh;
            for (int y = 0; y < fh; ++y) {
                for (int x = 0; x < fw; ++x) {
                    const int sx = std::clamp(static_cast<int>(std::lround((x + 0.5) * rx - 0.5)), 0,
                                              solver_cam_.width - 1);
                    const int sy = std::clamp(static_cast<int>(std::lround((y + 0.5) * ry - 0.5)), 0,
                                              solver_cam_.height - 1);
                    if (!obs(sx, sy)) p.depth(x, y) = 0.0;
                }
            }
            packets.push_back(std::move(p));
        }
        return packets;
    }

    std::vector<int> last_keyframe_ids(int count) const {
        std::vector<int> ids;
        const int n = static_cast<int>(graph_.size());
        for (int k = std::max(0, n - count); k < n; ++k) ids.push_back(graph_.keyframes()[k].id);
        return ids;
    }

private:
    // Recomputes depth covariance (and the observation mask) for all keyframes
    // in the given edge set, at the post-BA state.
    void refresh_covariances(const EdgeSet& edges) {
        const NormalEquations ne = residuals_and_jacobians(graph_, edges, solver_cam_, provider_);
        const DepthCovarianceResult cov = depth_covariance(ne);
        const int pixels = ne.grid_w * ne.grid_h;
        for (int slot = 0; slot < ne.num_poses(); ++slot) {
            Keyframe& kf = graph_.keyframe(ne.kf_ids[slot]);
            kf.depth.covariance = cov.sigma_d[slot];
            GridU8& obs = observed_[ne.kf_ids[slot]];
            for (int idx = 0; idx < pixels; ++idx) obs[idx] = ne.depth_observed[slot * pixels + idx];
        }
    }

    const Dataset& dataset_;
    const RunConfig& config_;
    FlowProvider& provider_;
    PinholeCamera solver_cam_;
    FrameGraph graph_;
    std::vector<GridU8> observed_;  // per keyframe id, solver resolution
    BAOptions ba_opts_;
};

// Sliding-window consumer of keyframe packets.
class MappingActor {
public:
    MappingActor(const RunConfig& config, PinholeCamera full_camera)
        : config_(config), full_camera_(std::move(full_camera)), rng_(config.rng_seed) {}

    // The bundle carries refreshed packets for the last-N keyframes, newest
    // last. Returns false when the newest is already in the window.
    bool accept(std::vector<KeyframePacket> bundle) {
        if (bundle.empty()) return false;
        const int newest = bundle.back().keyframe_id;
        for (int id : window_ids_)
            if (id == newest) return false;
        window_ids_.clear();
        window_.clear();
        for (auto& p : bundle) {
            window_ids_.push_back(p.keyframe_id);
            window_.push_back(std::move(p));
        }
        optimize_window(map_, window_, full_camera_, config_.mapping,
                        config_.mapping.iterations_per_keyframe, rng_);
        return true;
    }

    MapState& map() { return map_; }
    std::mt19937_64& rng() { return rng_; }

private:
    const RunConfig& config_;
    PinholeCamera full_camera_;
    std::mt19937_64 rng_;
    MapState map_;
    std::deque<KeyframePacket> window_;
    std::vector<int> window_ids_;
};

// Single-slot channel: a pending bundle is replaced by a newer one, so the
// mapping actor always sees the most recent keyframe when it becomes free.
class LatestSlot {
public:
    void push(std::vector<KeyframePacket> bundle) {
        std::lock_guard lock(mutex_);
        slot_ = std::move(bundle);
        cv_.notify_one();
    }
    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        cv_.notify_one();
    }
    std::optional<std::vector<KeyframePacket>> pop() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return slot_.has_value() || closed_; });
        if (slot_.has_value()) {
            auto out = std::move(*slot_);
            slot_.reset();
            return out;
        }
        return std::nullopt;
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::optional<std::vector<KeyframePacket>> slot_;
    bool closed_ = false;
};

}  // namespace

RunResult run(const Dataset& dataset, const RunConfig& config, FlowProvider* provider) {
    if (dataset.frames.empty()) throw DatasetError("dataset has no frames");
    const int first = config.clip_start_frames;
    const int n = static_cast<int>(dataset.frames.size());
    if (first >= n) throw DatasetError("clip removes every frame");

    const PinholeCamera& cam = dataset.camera;
    const PinholeCamera solver_cam =
        scaled_camera(cam, std::max(1, cam.width / config.solver_downsample),
                      std::max(1, cam.height / config.solver_downsample));

    // Without an injected provider, build the ground-truth oracle.
    std::optional<GroundTruthFlowProvider> oracle;
    if (!provider) {
        oracle.emplace(solver_cam, config.flow_noise_sigma_px, config.rng_seed);
        for (int f = first; f < n; ++f) {
            const DatasetFrame& frame = dataset.frames[f];
            if (!frame.gt_pose || !frame.gt_depth)
                throw DatasetError("ground-truth flow oracle needs gt poses and depths");
            auto sd = sample_solver_depth_impl(*frame.gt_depth, solver_cam.width, solver_cam.height);
            oracle->register_frame(f, *frame.gt_pose, std::move(sd.inverse_depth), std::move(sd.valid));
        }
        provider = &*oracle;
    }

    Tracker tracker(dataset, config, *provider);
    MappingActor actor(config, cam);

    LatestSlot channel;
    std::thread mapping_thread;
    std::exception_ptr mapping_error;
    if (config.mode == RunConfig::Mode::concurrent) {
        mapping_thread = std::thread([&] {
            try {
                while (auto bundle = channel.pop()) actor.accept(std::move(*bundle));
            } catch (...) {
                mapping_error = std::current_exception();
            }
        });
    }

    auto dispatch_mapping = [&](bool flush) {
        auto bundle = tracker.make_packets(tracker.last_keyframe_ids(config.mapping.window));
        if (config.mode == RunConfig::Mode::interleaved) {
            actor.accept(std::move(bundle));
        } else {
            channel.push(std::move(bundle));
            if (flush) {
                channel.close();
                mapping_thread.join();
                if (mapping_error) std::rethrow_exception(mapping_error);
            }
        }
    };

    tracker.add_keyframe(first);
    for (int f = first + 1; f < n; ++f) {
        const int latest_handle = tracker.graph().keyframes().back().feature_handle;
        const double flow = provider->mean_flow(latest_handle, f);
        if (!keyframe_decision(flow, config.keyframe_flow_threshold_px)) continue;

        tracker.add_keyframe(f);
        tracker.local_ba();
        if (static_cast<int>(tracker.graph().size()) % config.global_ba_period == 0)
            tracker.global_ba();
        dispatch_mapping(false);
    }

    // One last global BA at the end of tracking, then the final refresh.
    if (tracker.graph().size() >= 2) tracker.global_ba();
    dispatch_mapping(true);

    // Post-processing over all keyframes at the final state.
    const auto all_packets = tracker.make_packets(
        tracker.last_keyframe_ids(static_cast<int>(tracker.graph().size())));
    post_process(actor.map(), all_packets, cam, config.mapping,
                 config.mapping.postprocess_iterations, actor.rng());

    RunResult result;
    for (const Keyframe& kf : tracker.graph().keyframes()) {
        TrajectoryEntry entry;
        entry.frame_index = kf.feature_handle;
        entry.timestamp = dataset.frames[kf.feature_handle].timestamp;
        entry.pose = kf.pose;
        result.trajectory.push_back(entry);
        result.keyframe_frames.insert(kf.feature_handle);
    }
    result.map = std::move(actor.map());
    result.eval = evaluate(result.map.cloud, result.trajectory, result.keyframe_frames, dataset, config);
    return result;
}

EvalReport evaluate(const GaussianCloud& map, const std::vector<TrajectoryEntry>& trajectory,
                    const std::set<int>& mapping_frames, const Dataset& dataset,
                    const RunConfig& config) {
    if (trajectory.size() < 3) throw TooFewPoses();

    std::vector<Vec3> gt_pos, est_pos;
    std::vector<SE3Pose> gt_poses, est_poses;
    for (const auto& entry : trajectory) {
        const auto& frame = dataset.frames[entry.frame_index];
        if (!frame.gt_pose) continue;
        gt_pos.push_back(frame.gt_pose->translation());
        est_pos.push_back(entry.pose.translation());
        gt_poses.push_back(*frame.gt_pose);
        est_poses.push_back(entry.pose);
    }
    if (gt_pos.size() < 3) throw TooFewPoses();
    const Sim3 sim = fit_sim3(gt_pos, est_pos);

    EvalReport report;
    report.ate_rmse = ate_rmse(est_poses, gt_poses, true);

    const int first = config.clip_start_frames;
    double psnr_sum = 0.0, ssim_sum = 0.0, depth_sum = 0.0;
    int depth_count = 0;
    for (int f = first; f < static_cast<int>(dataset.frames.size()); ++f) {
        if ((f - first) % config.eval_stride != 0) continue;
        if (mapping_frames.count(f)) continue;
        const DatasetFrame& frame = dataset.frames[f];
        if (!frame.gt_pose) continue;

        const SE3Pose render_pose = sim.apply(*frame.gt_pose);
        const RenderedFrame rendered = rasterize(map, render_pose.inverse(), dataset.camera);

        FrameMetrics m;
        m.frame_index = f;
        m.timestamp = frame.timestamp;
        m.psnr_db = psnr_db(rendered.color, frame.image);
        m.ssim = ssim(rendered.color, frame.image);
        if (frame.gt_depth) {
            GridF descaled = rendered.depth;
            for (size_t i = 0; i < descaled.size(); ++i) descaled[i] /= sim.scale;
            m.depth_l1 = depth_l1(descaled, *frame.gt_depth);
            depth_sum += *m.depth_l1;
            ++depth_count;
        }
        psnr_sum += m.psnr_db;
        ssim_sum += m.ssim;
        report.frames.push_back(std::move(m));
    }
    if (report.frames.empty()) throw NoEvalFrames();

    const double nf = static_cast<double>(report.frames.size());
    report.mean_psnr_db = psnr_sum / nf;
    report.mean_ssim = ssim_sum / nf;
    if (depth_count > 0) report.mean_depth_l1 = depth_sum / depth_count;
    return report;
}

void write_trajectory(const std::string& path, const std::vector<TrajectoryEntry>& trajectory) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& e : trajectory) {
        const auto& t = e.pose.translation();
        const auto& q = e.pose.rotation();
        out << e.timestamp << ' ' << t.x() << ' ' << t.y() << ' ' << t.z() << ' ' << q.x() << ' '
            << q.y() << ' ' << q.z() << ' ' << q.w() << '\n';
    }
}

std::vector<TrajectoryEntry> read_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::vector<TrajectoryEntry> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        TrajectoryEntry e;
        double tx, ty, tz, qx, qy, qz, qw;
        if (!(ls >> e.timestamp >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
            throw MalformedLine(line_no, path);
        e.pose = SE3Pose(Eigen::Quaterniond(qw, qx, qy, qz), Vec3(tx, ty, tz));
        out.push_back(e);
    }
    return out;
}

void write_metrics(const std::string& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (const auto& m : report.frames) {
        nlohmann::ordered_json j;
        j["frame"] = m.frame_index;
        j["timestamp"] = m.timestamp;
        j["psnr_db"] = m.psnr_db;
        j["ssim"] = m.ssim;
        if (m.depth_l1) j["depth_l1"] = *m.depth_l1;
        out << j.dump() << '\n';
    }
    nlohmann::ordered_json summary;
    summary["summary"] = true;
    summary["eval_frames"] = report.frames.size();
    summary["mean_psnr_db"] = report.mean_psnr_db;
    summary["mean_ssim"] = report.mean_ssim;
    if (report.mean_depth_l1) summary["mean_depth_l1"] = *report.mean_depth_l1;
    if (report.ate_rmse) summary["ate_rmse"] = *report.ate_rmse;
    out << summary.dump() << '\n';
}

void write_run_outputs(const std::string& out_dir, const RunResult& result,
                       const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_trajectory((fs::path(out_dir) / "trajectory.txt").string(), result.trajectory);
    write_metrics((fs::path(out_dir) / "metrics.jsonl").string(), result.eval);
    save_gaussians((fs::path(out_dir) / "map.igs").string(), result.map.cloud);

    const Config snapshot = config.to_config();
    snapshot.save((fs::path(out_dir) / "config.txt").string());

    std::ofstream meta(fs::path(out_dir) / "map.meta.txt");
    meta << "iterations " << result.map.global_iteration << "\n";
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(snapshot.hash()));
    meta << "config_hash " << hex << "\n";
    meta << "rng_seed " << config.rng_seed << "\n";
}

}  // namespace igs
