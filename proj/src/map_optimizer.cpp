#include "igslam/map_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "igslam/errors.hpp"

namespace igs {

void MapState::append(const Gaussian3D& g, bool seeded_now) {
    cloud.add(g);
    adam.emplace_back();
    grad2d_accum.push_back(0.0);
    grad2d_count.push_back(0);
    grad_pos_accum.push_back(Vec3::Zero());
    seeded_this_window.push_back(seeded_now ? 1 : 0);
    seen_from_seed_view.push_back(0);
}

void MapState::remove_flagged(const std::vector<uint8_t>& flags) {
    size_t keep = 0;
    for (size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) continue;
        if (keep != i) {
            adam[keep] = adam[i];
            grad2d_accum[keep] = grad2d_accum[i];
            grad2d_count[keep] = grad2d_count[i];
            grad_pos_accum[keep] = grad_pos_accum[i];
            seeded_this_window[keep] = seeded_this_window[i];
            seen_from_seed_view[keep] = seen_from_seed_view[i];
        }
        ++keep;
    }
    adam.resize(keep);
    grad2d_accum.resize(keep);
    grad2d_count.resize(keep);
    grad_pos_accum.resize(keep);
    seeded_this_window.resize(keep);
    seen_from_seed_view.resize(keep);
    cloud.remove_if_flagged(flags);
}

void MapState::reset_densify_stats() {
    std::fill(grad2d_accum.begin(), grad2d_accum.end(), 0.0);
    std::fill(grad2d_count.begin(), grad2d_count.end(), 0);
    std::fill(grad_pos_accum.begin(), grad_pos_accum.end(), Vec3::Zero());
}

std::vector<Gaussian3D> seed_gaussians(const KeyframePacket& packet, const PyramidLevel& level,
                                       const PinholeCamera& full_camera, int theta,
                                       const GridU8& mask, double seed_opacity,
                                       std::mt19937_64& rng) {
    const int w = level.depth.width();
    const int h = level.depth.height();

    std::vector<int> candidates;
    candidates.reserve(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask(x, y) && level.depth(x, y) > 0.0) candidates.push_back(y * w + x);
    if (candidates.empty()) throw EmptyMask();

    const size_t count = std::min(candidates.size(),
                                  (candidates.size() + theta - 1) / static_cast<size_t>(theta));
    // Partial Fisher-Yates draw without replacement.
    for (size_t k = 0; k < count; ++k) {
        std::uniform_int_distribution<size_t> pick(k, candidates.size() - 1);
        std::swap(candidates[k], candidates[pick(rng)]);
    }

    const PinholeCamera cam = scaled_camera(full_camera, w, h);
    std::vector<Gaussian3D> seeds;
    seeds.reserve(count);
    for (size_t k = 0; k < count; ++k) {
        const int x = candidates[k] % w;
        const int y = candidates[k] / w;
        const double z = level.depth(x, y);
        const Vec3 cam_pt((x - cam.cx) / cam.fx * z, (y - cam.cy) / cam.fy * z, z);
        Gaussian3D g;
        g.position = packet.pose * cam_pt;
        g.color = level.image.rgb(x, y);
        g.opacity_logit = std::log(seed_opacity / (1.0 - seed_opacity));
        seeds.push_back(g);
    }

    // Isotropic scale from the mean distance to the nearest seeded neighbours.
    const int knn = 3;
    for (size_t a = 0; a < seeds.size(); ++a) {
        std::vector<double> d2;
        d2.reserve(seeds.size() - 1);
        for (size_t b = 0; b < seeds.size(); ++b)
            if (b != a) d2.push_back((seeds[a].position - seeds[b].position).squaredNorm());
        double scale;
        if (d2.empty()) {
            // Lone seed: one sample footprint, roughly sqrt(theta) pixels apart.
            const double z = (packet.pose.inverse() * seeds[a].position).z();
            scale = z * std::sqrt(static_cast<double>(theta)) / cam.fx;
        } else {
            const int take = std::min<int>(knn, static_cast<int>(d2.size()));
            std::partial_sort(d2.begin(), d2.begin() + take, d2.end());
            double mean = 0.0;
            for (int t = 0; t < take; ++t) mean += std::sqrt(d2[t]);
            scale = mean / take;
        }
        scale = std::max(scale, 1e-6);
        seeds[a].log_scale = Vec3::Constant(std::log(scale));
    }
    return seeds;
}

namespace {

double scene_extent(const GaussianCloud& cloud) {
    if (cloud.empty()) return 1.0;
    Vec3 centroid = Vec3::Zero();
    for (size_t i = 0; i < cloud.size(); ++i) centroid += cloud[i].position;
    centroid /= static_cast<double>(cloud.size());
    double r2 = 0.0;
    for (size_t i = 0; i < cloud.size(); ++i)
        r2 = std::max(r2, (cloud[i].position - centroid).squaredNorm());
    return std::max(std::sqrt(r2), 1e-6);
}

void adam_update(MapState& map, const BackwardResult& bw, const MappingConfig& cfg,
                 double lr_position) {
    const double b1 = cfg.adam_beta1;
    const double b2 = cfg.adam_beta2;
    const int n = static_cast<int>(map.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        AdamSlot& slot = map.adam[i];
        const GaussianGrads& g = bw.grads[i];
        slot.step += 1;
        const double c1 = 1.0 - std::pow(b1, slot.step);
        const double c2 = 1.0 - std::pow(b2, slot.step);

        auto step = [&](double grad, double& m, double& v, double lr, double& param) {
            m = b1 * m + (1.0 - b1) * grad;
            v = b2 * v + (1.0 - b2) * grad * grad;
            param -= lr * (m / c1) / (std::sqrt(v / c2) + cfg.adam_eps);
        };

        Gaussian3D& gs = map.cloud[i];
        for (int k = 0; k < 3; ++k)
            step(g.position(k), slot.m.position(k), slot.v.position(k), lr_position, gs.position(k));
        for (int k = 0; k < 3; ++k)
            step(g.color(k), slot.m.color(k), slot.v.color(k), cfg.lr_color, gs.color(k));
        for (int k = 0; k < 3; ++k)
            step(g.log_scale(k), slot.m.log_scale(k), slot.v.log_scale(k), cfg.lr_log_scale,
                 gs.log_scale(k));
        step(g.opacity_logit, slot.m.opacity_logit, slot.v.opacity_logit, cfg.lr_opacity,
             gs.opacity_logit);

        Eigen::Vector4d q(gs.rotation.w(), gs.rotation.x(), gs.rotation.y(), gs.rotation.z());
        for (int k = 0; k < 4; ++k)
            step(g.rotation(k), slot.m.rotation(k), slot.v.rotation(k), cfg.lr_rotation, q(k));
        gs.rotation = Eigen::Quaterniond(q(0), q(1), q(2), q(3)).normalized();

        gs.color = gs.color.cwiseMax(0.0).cwiseMin(1.0);
    }
}

}  // namespace

double mapping_step(MapState& map, const KeyframePacket& packet_pose_source,
                    const ImageRGB& target_image, const GridF& target_depth,
                    const GridF& target_cov, const PinholeCamera& level_camera,
                    const MappingConfig& cfg) {
    if (map.cloud.empty()) return 0.0;
    const SE3Pose t_cw = packet_pose_source.pose.inverse();
    const RenderedFrame rendered = rasterize(map.cloud, t_cw, level_camera);
    const MappingLoss loss = mapping_loss(rendered, target_image, target_depth, target_cov,
                                          cfg.loss_alpha, cfg.depth_loss_eps);
    const BackwardResult bw =
        rasterize_backward(map.cloud, t_cw, level_camera, loss.grad_color, loss.grad_depth);

    for (size_t i = 0; i < map.size(); ++i) {
        if (!bw.visible[i]) continue;
        map.grad2d_accum[i] += bw.grad2d_norm[i];
        map.grad2d_count[i] += 1;
        map.grad_pos_accum[i] += bw.grads[i].position;
    }

    const double lr_pos = lr_schedule(static_cast<double>(map.global_iteration),
                                      cfg.lr_position_initial, cfg.lr_position_final,
                                      cfg.lr_decay_tau);
    adam_update(map, bw, cfg, lr_pos);
    map.global_iteration += 1;
    return loss.value;
}

DensifyReport densify_and_prune(MapState& map, const MappingConfig& cfg) {
    DensifyReport report;
    const double extent = scene_extent(map.cloud);
    const double split_scale_limit = 0.01 * extent;

    const size_t n = map.size();
    std::vector<uint8_t> remove(n, 0);
    std::vector<std::pair<Gaussian3D, uint8_t>> additions;  // gaussian, seeded flag

    for (size_t i = 0; i < n; ++i) {
        const Gaussian3D& g = map.cloud[i];
        if (g.opacity() < cfg.prune_opacity) {
            remove[i] = 1;
            ++report.pruned_opacity;
            continue;
        }
        if (map.grad2d_count[i] == 0) continue;
        const double mean_grad = map.grad2d_accum[i] / map.grad2d_count[i];
        if (mean_grad <= cfg.densify_grad_threshold) continue;

        int axis = 0;
        g.log_scale.maxCoeff(&axis);
        const double sigma_max = std::exp(g.log_scale(axis));
        if (sigma_max > split_scale_limit) {
            // Split: two children at +-1 sigma along the principal axis,
            // scales shrunk by 1.6, parent removed.
            const Vec3 dir = g.rotation.normalized().toRotationMatrix().col(axis);
            for (int sgn : {-1, 1}) {
                Gaussian3D child = g;
                child.position = g.position + sgn * sigma_max * dir;
                child.log_scale = g.log_scale - Vec3::Constant(std::log(1.6));
                additions.emplace_back(child, map.seeded_this_window[i]);
            }
            remove[i] = 1;
            ++report.split;
        } else {
            // Clone, nudged along the descent direction.
            Gaussian3D child = g;
            const Vec3 gp = map.grad_pos_accum[i];
            if (gp.norm() > 1e-12) child.position -= gp.normalized() * sigma_max;
            additions.emplace_back(child, map.seeded_this_window[i]);
            ++report.cloned;
        }
    }

    map.remove_flagged(remove);
    for (const auto& [g, seeded] : additions) map.append(g, seeded != 0);
    map.reset_densify_stats();
    return report;
}

DensifyReport prune_occluded(MapState& map, const KeyframePacket& newest,
                             const PinholeCamera& full_camera) {
    DensifyReport report;
    if (map.cloud.empty()) return report;

    RasterizeInfo info;
    rasterize(map.cloud, newest.pose.inverse(), full_camera, &info);
    std::vector<uint8_t> remove(map.size(), 0);
    for (size_t i = 0; i < map.size(); ++i) {
        if (info.visible[i]) map.seen_from_seed_view[i] = 1;
        if (map.seeded_this_window[i] && !map.seen_from_seed_view[i]) {
            remove[i] = 1;
            ++report.pruned_occluded;
        }
    }
    map.remove_flagged(remove);
    std::fill(map.seeded_this_window.begin(), map.seeded_this_window.end(), 0);
    std::fill(map.seen_from_seed_view.begin(), map.seen_from_seed_view.end(), 0);
    return report;
}

void optimize_window(MapState& map, const std::deque<KeyframePacket>& window,
                     const PinholeCamera& full_camera, const MappingConfig& cfg, int budget,
                     std::mt19937_64& rng) {
    if (window.empty()) throw Error("optimize_window: empty window");
    if (budget <= 0) return;

    const KeyframePacket& newest = window.back();
    const auto newest_pyramid = build_pyramid(newest, cfg.downsample_factor, cfg.levels);

    std::vector<std::vector<PyramidLevel>> pyramids;
    pyramids.reserve(window.size());
    for (const auto& p : window) pyramids.push_back(build_pyramid(p, cfg.downsample_factor, cfg.levels));

    const int per_level = budget / cfg.levels;
    int remainder = budget - per_level * cfg.levels;
    int round_robin = 0;

    for (int l = cfg.levels - 1; l >= 0; --l) {
        const PyramidLevel& seed_level = newest_pyramid[l];
        const GridU8 mask = covariance_mask(seed_level.covariance, cfg.mask_threshold, cfg.mask_kernel);
        const auto seeds = seed_gaussians(newest, seed_level, full_camera, cfg.seed_stride, mask,
                                          cfg.seed_opacity, rng);
        for (const auto& g : seeds) map.append(g, true);

        int iters = per_level + (l == 0 ? remainder : 0);
        for (int it = 0; it < iters; ++it) {
            const size_t k = round_robin % window.size();
            ++round_robin;
            const PyramidLevel& lvl = pyramids[k][l];
            const PinholeCamera cam = scaled_camera(full_camera, lvl.image.width(), lvl.image.height());
            mapping_step(map, window[k], lvl.image, lvl.depth, lvl.covariance, cam, cfg);
            if (map.global_iteration % cfg.densify_interval == 0) densify_and_prune(map, cfg);
        }
    }

    prune_occluded(map, newest, full_camera);
}

void post_process(MapState& map, const std::vector<KeyframePacket>& keyframes,
                  const PinholeCamera& full_camera, const MappingConfig& cfg, int beta,
                  std::mt19937_64& rng) {
    if (beta <= 0 || keyframes.empty()) return;
    std::uniform_int_distribution<size_t> pick(0, keyframes.size() - 1);
    for (int it = 0; it < beta; ++it) {
        const KeyframePacket& packet = keyframes[pick(rng)];
        mapping_step(map, packet, packet.image, packet.depth, packet.depth_covariance, full_camera,
                     cfg);
    }
}

}  // namespace igs
