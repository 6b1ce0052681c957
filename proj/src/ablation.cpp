#include "igslam/ablation.hpp"

#include <cmath>

#include "igslam/errors.hpp"

namespace igs {

namespace {

// Smooth spatial sigma field: a strong blob over a mild baseline, so the
// covariance weighting has something to discount.
double noise_sigma_at(double base, int x, int y, int w, int h) {
    const double u = (x - 0.62 * w) / (0.18 * w);
    const double v = (y - 0.38 * h) / (0.18 * h);
    const double blob = std::exp(-0.5 * (u * u + v * v));
    return base * (0.15 + 0.85 * blob);
}

}  // namespace

MappingAblation::MappingAblation(const Dataset& dataset, const RunConfig& base,
                                 const MappingProtocolOptions& options)
    : dataset_(dataset), config_(base), options_(options), rng_(options.seed) {
    if (dataset.frames.empty()) throw DatasetError("dataset has no frames");

    if (!options.decay) {
        config_.mapping.lr_position_initial = options.constant_lr;
        config_.mapping.lr_position_final = options.constant_lr;
    }
    config_.mapping.loss_alpha = options.loss_alpha;

    std::mt19937_64 noise_rng(options.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int n = static_cast<int>(dataset.frames.size());
    for (int f = 0; f < n; f += options.keyframe_stride) {
        const DatasetFrame& frame = dataset.frames[f];
        if (!frame.gt_pose || !frame.gt_depth)
            throw DatasetError("mapping protocol needs gt poses and depths");

        KeyframePacket p;
        p.keyframe_id = static_cast<int>(keyframe_indices_.size());
        p.image = frame.image;
        p.pose = *frame.gt_pose;
        p.depth = *frame.gt_depth;
        const int w = p.depth.width(), h = p.depth.height();
        p.depth_covariance = GridF(w, h, 0.0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double sigma = noise_sigma_at(options.depth_noise_base, x, y, w, h);
                if (p.depth(x, y) > 0.0 && sigma > 0.0)
                    p.depth(x, y) = std::max(p.depth(x, y) + sigma * gauss(noise_rng), 1e-3);
                p.depth_covariance(x, y) = options.covariance_weighting ? sigma * sigma : 1.0;
            }
        }
        packets_.push_back(std::move(p));
        keyframe_indices_.push_back(f);

        TrajectoryEntry entry;
        entry.frame_index = f;
        entry.timestamp = frame.timestamp;
        entry.pose = *frame.gt_pose;
        trajectory_.push_back(entry);
    }

    // Decay spans the whole protocol budget.
    const long long total =
        static_cast<long long>(packets_.size()) * config_.mapping.iterations_per_keyframe;
    config_.mapping.lr_decay_tau = static_cast<double>(std::max<long long>(total, 1));
}

void MappingAblation::run_mapping() {
    std::deque<KeyframePacket> window;
    for (const auto& packet : packets_) {
        window.push_back(packet);
        while (static_cast<int>(window.size()) > config_.mapping.window) window.pop_front();
        optimize_window(map_, window, dataset_.camera, config_.mapping,
                        config_.mapping.iterations_per_keyframe, rng_);
    }
}

void MappingAblation::run_postprocess(int iterations) {
    post_process(map_, packets_, dataset_.camera, config_.mapping, iterations, rng_);
}

EvalReport MappingAblation::evaluate() const {
    std::set<int> used(keyframe_indices_.begin(), keyframe_indices_.end());
    return igs::evaluate(map_.cloud, trajectory_, used, dataset_, config_);
}

DecayAblationResult ablate_decay(const Dataset& dataset, const RunConfig& base) {
    MappingProtocolOptions opt;
    opt.seed = base.rng_seed;
    opt.depth_noise_base = 0.02;  // exercise position learning

    auto run_with = [&](bool decay, double lr) {
        MappingProtocolOptions o = opt;
        o.decay = decay;
        o.constant_lr = lr;
        MappingAblation ab(dataset, base, o);
        ab.run_mapping();
        return ab.evaluate().mean_psnr_db;
    };

    const double lr_i = base.mapping.lr_position_initial;
    const double lr_f = base.mapping.lr_position_final;
    DecayAblationResult out;
    out.psnr_decay = run_with(true, lr_i);
    out.psnr_constant_low = run_with(false, lr_f);
    out.psnr_constant_mid = run_with(false, 5e-5);
    out.psnr_constant_high = run_with(false, lr_i);
    return out;
}

DepthLossAblationResult ablate_depth_loss(const Dataset& dataset, const RunConfig& base) {
    MappingProtocolOptions opt;
    opt.seed = base.rng_seed;
    opt.depth_noise_base = 0.05;

    auto run_with = [&](double alpha, bool weighting) {
        MappingProtocolOptions o = opt;
        o.loss_alpha = alpha;
        o.covariance_weighting = weighting;
        MappingAblation ab(dataset, base, o);
        ab.run_mapping();
        return ab.evaluate();
    };

    DepthLossAblationResult out;
    const EvalReport weighted = run_with(base.mapping.loss_alpha, true);
    const EvalReport no_depth = run_with(1.0, true);
    const EvalReport raw = run_with(base.mapping.loss_alpha, false);
    out.depth_l1_weighted = weighted.mean_depth_l1.value_or(0.0);
    out.depth_l1_no_depth = no_depth.mean_depth_l1.value_or(0.0);
    out.depth_l1_raw = raw.mean_depth_l1.value_or(0.0);
    out.psnr_weighted = weighted.mean_psnr_db;
    out.psnr_no_depth = no_depth.mean_psnr_db;
    out.psnr_raw = raw.mean_psnr_db;
    return out;
}

PostprocessAblationResult ablate_postprocess(const Dataset& dataset, const RunConfig& base) {
    MappingProtocolOptions opt;
    opt.seed = base.rng_seed;
    opt.depth_noise_base = 0.02;

    MappingAblation ab(dataset, base, opt);
    ab.run_mapping();

    PostprocessAblationResult out;
    out.psnr_beta0 = ab.evaluate().mean_psnr_db;
    ab.run_postprocess(500);
    out.psnr_beta500 = ab.evaluate().mean_psnr_db;
    ab.run_postprocess(1500);
    out.psnr_beta2000 = ab.evaluate().mean_psnr_db;
    return out;
}

}  // namespace igs
