#include "igslam/rasterizer.hpp"

#include "rasterizer_detail.hpp"

namespace igs {

using detail::Footprint;
using detail::ProjectionSet;

RenderedFrame rasterize(const GaussianCloud& cloud, const SE3Pose& t_cw, const PinholeCamera& cam,
                        RasterizeInfo* info) {
    RenderedFrame frame;
    frame.color = ImageRGB(cam.width, cam.height);
    frame.depth = GridF(cam.width, cam.height, 0.0);
    frame.alpha_acc = GridF(cam.width, cam.height, 0.0);

    const ProjectionSet set = detail::project_and_bucket(cloud, t_cw, cam);
    const int num_tiles = set.tiles_x * set.tiles_y;

    // Per-tile contribution flags, merged in tile order below.
    std::vector<std::vector<uint32_t>> tile_contrib;
    if (info) tile_contrib.resize(num_tiles);

#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < num_tiles; ++t) {
        const auto& bucket = set.tile[t];
        if (bucket.empty()) continue;
        const int px0 = (t % set.tiles_x) * kTileSize;
        const int py0 = (t / set.tiles_x) * kTileSize;
        const int px1 = std::min(px0 + kTileSize, cam.width);
        const int py1 = std::min(py0 + kTileSize, cam.height);

        std::vector<uint8_t> contributed(info ? bucket.size() : 0, 0);

        for (int py = py0; py < py1; ++py) {
            for (int px = px0; px < px1; ++px) {
                double transmittance = 1.0;
                Vec3 color = Vec3::Zero();
                double depth = 0.0;
                double alpha_acc = 0.0;
                for (size_t b = 0; b < bucket.size(); ++b) {
                    if (transmittance < kTransmittanceStop) break;
                    const Footprint& f = set.sorted[bucket[b]];
                    const double maha = detail::mahalanobis2(f, px, py);
                    if (maha > kCutoffSigma * kCutoffSigma) continue;
                    double alpha = f.opacity * std::exp(-0.5 * maha);
                    if (alpha < kAlphaMin) continue;
                    alpha = std::min(alpha, kAlphaClamp);
                    const double weight = alpha * transmittance;
                    color += f.color * weight;
                    depth += f.depth * weight;
                    alpha_acc += weight;
                    transmittance *= (1.0 - alpha);
                    if (info) contributed[b] = 1;
                }
                frame.color.set_rgb(px, py, color);
                frame.depth(px, py) = depth;
                frame.alpha_acc(px, py) = alpha_acc;
            }
        }

        if (info) {
            auto& out = tile_contrib[t];
            for (size_t b = 0; b < bucket.size(); ++b)
                if (contributed[b]) out.push_back(set.sorted[bucket[b]].cloud_idx);
        }
    }

    if (info) {
        info->visible.assign(cloud.size(), 0);
        for (int t = 0; t < num_tiles; ++t)
            for (uint32_t idx : tile_contrib[t]) info->visible[idx] = 1;
    }
    return frame;
}

}  // namespace igs
