#include <algorithm>
#include <cmath>
#include <vector>

#include "igslam/rasterizer.hpp"

namespace igs {

// Deliberately naive: one globally sorted list, every pixel walks all of it.
RenderedFrame rasterize_reference(const GaussianCloud& cloud, const SE3Pose& t_cw,
                                  const PinholeCamera& cam) {
    struct Entry {
        Vec2 mean2d;
        Eigen::Matrix2d conic;
        double depth;
        double opacity;
        Vec3 color;
        uint64_t id;
    };
    std::vector<Entry> entries;
    for (size_t i = 0; i < cloud.size(); ++i) {
        auto proj = project_gaussian(cloud[i], t_cw, cam);
        if (!proj) continue;
        const double det = proj->cov2d.determinant();
        if (det <= 0.0) continue;
        Entry e;
        e.mean2d = proj->mean2d;
        e.conic = proj->cov2d.inverse();
        e.depth = proj->depth;
        e.opacity = proj->opacity;
        e.color = proj->color;
        e.id = cloud.id(i);
        entries.push_back(e);
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id < b.id;
    });

    RenderedFrame frame;
    frame.color = ImageRGB(cam.width, cam.height);
    frame.depth = GridF(cam.width, cam.height, 0.0);
    frame.alpha_acc = GridF(cam.width, cam.height, 0.0);

    for (int py = 0; py < cam.height; ++py) {
        for (int px = 0; px < cam.width; ++px) {
            double transmittance = 1.0;
            Vec3 color = Vec3::Zero();
            double depth = 0.0;
            double alpha_acc = 0.0;
            for (const Entry& e : entries) {
                if (transmittance < kTransmittanceStop) break;
                const Vec2 d(px - e.mean2d.x(), py - e.mean2d.y());
                const double maha = d.dot(e.conic * d);
                if (maha > kCutoffSigma * kCutoffSigma) continue;
                double alpha = e.opacity * std::exp(-0.5 * maha);
                if (alpha < kAlphaMin) continue;
                alpha = std::min(alpha, kAlphaClamp);
                const double weight = alpha * transmittance;
                color += e.color * weight;
                depth += e.depth * weight;
                alpha_acc += weight;
                transmittance *= (1.0 - alpha);
            }
            frame.color.set_rgb(px, py, color);
            frame.depth(px, py) = depth;
            frame.alpha_acc(px, py) = alpha_acc;
        }
    }
    return frame;
}

}  // namespace igs
