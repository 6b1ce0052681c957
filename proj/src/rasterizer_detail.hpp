#pragma once

// Shared projection/sorting/bucketing stage of the tiled forward and backward
// passes. Internal to the rasterizer translation units.

#include <algorithm>
#include <cmath>
#include <vector>

#include "igslam/rasterizer.hpp"

namespace igs::detail {

struct Footprint {
    Vec2 mean2d;
    double conic_xx, conic_xy, conic_yy;  // cov2d^-1
    double depth;
    double opacity;  // post-sigmoid
    Vec3 color;
    double radius;       // kCutoffSigma * sqrt(major eigenvalue)
    uint32_t cloud_idx;  // index into the input cloud
};

struct ProjectionSet {
    std::vector<Footprint> sorted;            // front-to-back, ties by id
    std::vector<std::vector<uint32_t>> tile;  // per tile, indices into `sorted`
    int tiles_x = 0, tiles_y = 0;
};

inline ProjectionSet project_and_bucket(const GaussianCloud& cloud, const SE3Pose& t_cw,
                                        const PinholeCamera& cam) {
    ProjectionSet set;
    set.tiles_x = (cam.width + kTileSize - 1) / kTileSize;
    set.tiles_y = (cam.height + kTileSize - 1) / kTileSize;

    const int n = static_cast<int>(cloud.size());
    std::vector<Footprint> fps(n);
    std::vector<uint8_t> alive(n, 0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        auto proj = project_gaussian(cloud[i], t_cw, cam);
        if (!proj) continue;
        const Eigen::Matrix2d& c = proj->cov2d;
        const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
        if (det <= 0.0) continue;
        const double inv_det = 1.0 / det;
        Footprint& f = fps[i];
        f.mean2d = proj->mean2d;
        f.conic_xx = c(1, 1) * inv_det;
        f.conic_xy = -c(0, 1) * inv_det;
        f.conic_yy = c(0, 0) * inv_det;
        f.depth = proj->depth;
        f.opacity = proj->opacity;
        f.color = proj->color;
        const double half_trace = 0.5 * (c(0, 0) + c(1, 1));
        const double disc = std::sqrt(std::max(half_trace * half_trace - det, 0.0));
        f.radius = kCutoffSigma * std::sqrt(std::max(half_trace + disc, 0.0));
        f.cloud_idx = static_cast<uint32_t>(i);
        alive[i] = 1;
    }

    std::vector<uint32_t> order;
    order.reserve(n);
    for (int i = 0; i < n; ++i)
        if (alive[i]) order.push_back(static_cast<uint32_t>(i));
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (fps[a].depth != fps[b].depth) return fps[a].depth < fps[b].depth;
        return cloud.id(a) < cloud.id(b);
    });

    set.sorted.reserve(order.size());
    for (uint32_t i : order) set.sorted.push_back(fps[i]);

    set.tile.resize(static_cast<size_t>(set.tiles_x) * set.tiles_y);
    for (uint32_t s = 0; s < set.sorted.size(); ++s) {
        const Footprint& f = set.sorted[s];
        const int tx0 = std::max(0, static_cast<int>(std::floor((f.mean2d.x() - f.radius) / kTileSize)));
        const int tx1 = std::min(set.tiles_x - 1, static_cast<int>(std::floor((f.mean2d.x() + f.radius) / kTileSize)));
        const int ty0 = std::max(0, static_cast<int>(std::floor((f.mean2d.y() - f.radius) / kTileSize)));
        const int ty1 = std::min(set.tiles_y - 1, static_cast<int>(std::floor((f.mean2d.y() + f.radius) / kTileSize)));
        for (int ty = ty0; ty <= ty1; ++ty)
            for (int tx = tx0; tx <= tx1; ++tx) set.tile[static_cast<size_t>(ty) * set.tiles_x + tx].push_back(s);
    }
    return set;
}

// Mahalanobis distance squared under the stored conic.
inline double mahalanobis2(const Footprint& f, double px, double py) {
    const double dx = px - f.mean2d.x();
    const double dy = py - f.mean2d.y();
    return f.conic_xx * dx * dx + 2.0 * f.conic_xy * dx * dy + f.conic_yy * dy * dy;
}

}  // namespace igs::detail
