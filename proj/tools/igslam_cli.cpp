#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "igslam/ablation.hpp"
#include "igslam/errors.hpp"
#include "igslam/pipeline.hpp"
#include "igslam/png_io.hpp"
#include "igslam/rasterizer.hpp"
#include "igslam/splat_io.hpp"

namespace fs = std::filesystem;

namespace {

igs::RunConfig load_run_config(const std::string& config_path, const std::string& dataset,
                               const std::string& mode, uint64_t seed, bool have_seed) {
    igs::Config cfg;
    if (!config_path.empty()) cfg = igs::Config::from_file(config_path);
    if (!dataset.empty()) cfg.set("dataset_dir", dataset);
    if (!mode.empty()) cfg.set("mode", mode);
    if (have_seed) cfg.set("rng_seed", std::to_string(seed));
    return igs::RunConfig::from_config(cfg);
}

igs::Dataset open_dataset(const igs::RunConfig& config) {
    if (config.dataset_dir.empty()) throw igs::DatasetError("no dataset directory configured");
    const igs::PinholeCamera* intr =
        config.tum_intrinsics.fx > 0.0 ? &config.tum_intrinsics : nullptr;
    return igs::load_dataset(config.dataset_dir, config.dataset_format, intr);
}

int cmd_run(const std::string& config_path, const std::string& dataset, const std::string& mode,
            uint64_t seed, bool have_seed, const std::string& out_dir) {
    const igs::RunConfig config = load_run_config(config_path, dataset, mode, seed, have_seed);
    const igs::Dataset ds = open_dataset(config);
    const igs::RunResult result = igs::run(ds, config);
    igs::write_run_outputs(out_dir, result, config);

    std::printf("keyframes: %zu\n", result.trajectory.size());
    std::printf("gaussians: %zu\n", result.map.cloud.size());
    std::printf("mean psnr: %.2f dB\n", result.eval.mean_psnr_db);
    std::printf("mean ssim: %.4f\n", result.eval.mean_ssim);
    if (result.eval.mean_depth_l1) std::printf("mean depth l1: %.5f\n", *result.eval.mean_depth_l1);
    if (result.eval.ate_rmse) std::printf("ate rmse: %.6f\n", *result.eval.ate_rmse);
    std::printf("outputs written to %s\n", out_dir.c_str());
    return 0;
}

int cmd_eval(const std::string& run_dir) {
    const igs::Config cfg = igs::Config::from_file((fs::path(run_dir) / "config.txt").string());
    const igs::RunConfig config = igs::RunConfig::from_config(cfg);
    const igs::Dataset ds = open_dataset(config);
    const auto trajectory = igs::read_trajectory((fs::path(run_dir) / "trajectory.txt").string());
    const igs::GaussianCloud map = igs::load_gaussians((fs::path(run_dir) / "map.igs").string());

    // Associate trajectory entries back to dataset frames by timestamp.
    std::vector<igs::TrajectoryEntry> traj = trajectory;
    std::set<int> keyframe_frames;
    for (auto& e : traj) {
        int best = -1;
        double best_dt = 1e-4;
        for (size_t f = 0; f < ds.frames.size(); ++f) {
            const double dt = std::abs(ds.frames[f].timestamp - e.timestamp);
            if (dt < best_dt) {
                best_dt = dt;
                best = static_cast<int>(f);
            }
        }
        if (best < 0) throw igs::DatasetError("trajectory timestamp not present in dataset");
        e.frame_index = best;
        keyframe_frames.insert(best);
    }

    const igs::EvalReport report = igs::evaluate(map, traj, keyframe_frames, ds, config);
    igs::write_metrics((fs::path(run_dir) / "metrics.eval.jsonl").string(), report);
    std::printf("eval frames: %zu\n", report.frames.size());
    std::printf("mean psnr: %.2f dB\n", report.mean_psnr_db);
    std::printf("mean ssim: %.4f\n", report.mean_ssim);
    if (report.mean_depth_l1) std::printf("mean depth l1: %.5f\n", *report.mean_depth_l1);
    if (report.ate_rmse) std::printf("ate rmse: %.6f\n", *report.ate_rmse);
    return 0;
}

int cmd_ablate(const std::string& which, const std::string& config_path,
               const std::string& dataset) {
    const igs::RunConfig config = load_run_config(config_path, dataset, "", 0, false);
    const igs::Dataset ds = open_dataset(config);
    if (which == "decay") {
        const auto r = igs::ablate_decay(ds, config);
        std::printf("%-28s %8s\n", "position lr", "psnr db");
        std::printf("%-28s %8.2f\n", "1.6e-6 constant", r.psnr_constant_low);
        std::printf("%-28s %8.2f\n", "5e-5 constant", r.psnr_constant_mid);
        std::printf("%-28s %8.2f\n", "1.6e-4 constant", r.psnr_constant_high);
        std::printf("%-28s %8.2f\n", "1.6e-4 with decay", r.psnr_decay);
    } else if (which == "depthloss") {
        const auto r = igs::ablate_depth_loss(ds, config);
        std::printf("%-12s %8s %10s\n", "variant", "psnr db", "depth l1");
        std::printf("%-12s %8.2f %10.5f\n", "weighted", r.psnr_weighted, r.depth_l1_weighted);
        std::printf("%-12s %8.2f %10.5f\n", "no depth", r.psnr_no_depth, r.depth_l1_no_depth);
        std::printf("%-12s %8.2f %10.5f\n", "raw depth", r.psnr_raw, r.depth_l1_raw);
    } else if (which == "postproc") {
        const auto r = igs::ablate_postprocess(ds, config);
        std::printf("%-12s %8s\n", "beta", "psnr db");
        std::printf("%-12s %8.2f\n", "0", r.psnr_beta0);
        std::printf("%-12s %8.2f\n", "500", r.psnr_beta500);
        std::printf("%-12s %8.2f\n", "2000", r.psnr_beta2000);
    } else {
        std::fprintf(stderr, "unknown ablation: %s\n", which.c_str());
        return 1;
    }
    return 0;
}

int cmd_render(const std::string& checkpoint, const std::string& pose_arg,
               const std::string& run_dir, const std::string& intrinsics_arg,
               const std::string& out_path) {
    const igs::GaussianCloud map = igs::load_gaussians(checkpoint);

    igs::PinholeCamera cam;
    if (!intrinsics_arg.empty()) {
        std::istringstream ss(intrinsics_arg);
        char comma;
        if (!(ss >> cam.fx >> comma >> cam.fy >> comma >> cam.cx >> comma >> cam.cy >> comma >>
              cam.width >> comma >> cam.height))
            throw igs::Error("--intrinsics expects fx,fy,cx,cy,width,height");
    } else if (!run_dir.empty()) {
        const igs::Config cfg = igs::Config::from_file((fs::path(run_dir) / "config.txt").string());
        const igs::RunConfig config = igs::RunConfig::from_config(cfg);
        cam = open_dataset(config).camera;
    } else {
        throw igs::Error("render needs --intrinsics or --run to resolve the camera");
    }

    igs::SE3Pose pose;
    if (pose_arg.find(',') != std::string::npos) {
        // "tx,ty,tz,qx,qy,qz,qw"
        std::istringstream ss(pose_arg);
        double v[7];
        char comma;
        for (int i = 0; i < 7; ++i) {
            if (i) ss >> comma;
            if (!(ss >> v[i])) throw igs::Error("--pose expects tx,ty,tz,qx,qy,qz,qw");
        }
        pose = igs::SE3Pose(Eigen::Quaterniond(v[6], v[3], v[4], v[5]), igs::Vec3(v[0], v[1], v[2]));
    } else {
        if (run_dir.empty()) throw igs::Error("--pose <id> needs --run for the trajectory");
        const auto traj = igs::read_trajectory((fs::path(run_dir) / "trajectory.txt").string());
        const int id = std::stoi(pose_arg);
        if (id < 0 || id >= static_cast<int>(traj.size()))
            throw igs::Error("pose id out of range (trajectory has " +
                             std::to_string(traj.size()) + " entries)");
        pose = traj[id].pose;
    }

    const igs::RenderedFrame frame = igs::rasterize(map, pose.inverse(), cam);
    igs::save_png_rgb8(out_path, frame.color);
    std::printf("rendered %dx%d image to %s\n", cam.width, cam.height, out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dense SLAM with depth-uncertainty-aware Gaussian splatting"};
    app.require_subcommand(1);

    std::string config_path, dataset_dir, mode, out_dir, run_dir;
    std::string checkpoint, pose_arg, intrinsics_arg, out_path, which;
    uint64_t seed = 0;

    auto* run_cmd = app.add_subcommand("run", "track and map a dataset");
    run_cmd->add_option("--dataset", dataset_dir, "dataset directory");
    run_cmd->add_option("--config", config_path, "config file");
    run_cmd->add_option("--mode", mode, "interleaved|concurrent");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "rng seed");
    run_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* eval_cmd = app.add_subcommand("eval", "re-evaluate a finished run");
    eval_cmd->add_option("--run", run_dir, "run output directory")->required();

    auto* ablate_cmd = app.add_subcommand("ablate", "reproduce the ablation protocols");
    ablate_cmd->add_option("kind", which, "decay|depthloss|postproc")->required();
    ablate_cmd->add_option("--dataset", dataset_dir, "dataset directory");
    ablate_cmd->add_option("--config", config_path, "config file");

    auto* render_cmd = app.add_subcommand("render", "render a checkpoint from a pose");
    render_cmd->add_option("--checkpoint", checkpoint, "gaussian checkpoint file")->required();
    render_cmd->add_option("--pose", pose_arg, "trajectory index or tx,ty,tz,qx,qy,qz,qw")->required();
    render_cmd->add_option("--run", run_dir, "run directory for trajectory/intrinsics");
    render_cmd->add_option("--intrinsics", intrinsics_arg, "fx,fy,cx,cy,width,height");
    render_cmd->add_option("--out", out_path, "output png")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(config_path, dataset_dir, mode, seed, seed_opt->count() > 0, out_dir);
        if (eval_cmd->parsed()) return cmd_eval(run_dir);
        if (ablate_cmd->parsed()) return cmd_ablate(which, config_path, dataset_dir);
        if (render_cmd->parsed())
            return cmd_render(checkpoint, pose_arg, run_dir, intrinsics_arg, out_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
