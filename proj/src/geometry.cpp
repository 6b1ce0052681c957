#include "igslam/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace igs {

double bilinear_sample(const GridF& g, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(g.width() - 1));
    y = std::clamp(y, 0.0, static_cast<double>(g.height() - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, g.width() - 1);
    const int y1 = std::min(y0 + 1, g.height() - 1);
    const double ax = x - x0;
    const double ay = y - y0;
    const double top = g(x0, y0) * (1.0 - ax) + g(x1, y0) * ax;
    const double bot = g(x0, y1) * (1.0 - ax) + g(x1, y1) * ax;
    return top * (1.0 - ay) + bot * ay;
}

GridF resize_bilinear(const GridF& src, int dst_w, int dst_h) {
    GridF dst(dst_w, dst_h);
    const double rx = static_cast<double>(src.width()) / dst_w;
    const double ry = static_cast<double>(src.height()) / dst_h;
#pragma omp parallel for
    for (int y = 0; y < dst_h; ++y) {
        for (int x = 0; x < dst_w; ++x) {
            dst(x, y) = bilinear_sample(src, (x + 0.5) * rx - 0.5, (y + 0.5) * ry - 0.5);
        }
    }
    return dst;
}

ImageRGB resize_bilinear(const ImageRGB& src, int dst_w, int dst_h) {
    ImageRGB dst(dst_w, dst_h);
    const double rx = static_cast<double>(src.width()) / dst_w;
    const double ry = static_cast<double>(src.height()) / dst_h;
#pragma omp parallel for
    for (int y = 0; y < dst_h; ++y) {
        for (int x = 0; x < dst_w; ++x) {
            const double sx = std::clamp((x + 0.5) * rx - 0.5, 0.0, static_cast<double>(src.width() - 1));
            const double sy = std::clamp((y + 0.5) * ry - 0.5, 0.0, static_cast<double>(src.height() - 1));
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const int y1 = std::min(y0 + 1, src.height() - 1);
            const double ax = sx - x0;
            const double ay = sy - y0;
            for (int c = 0; c < 3; ++c) {
                const double top = src.at(x0, y0, c) * (1.0 - ax) + src.at(x1, y0, c) * ax;
                const double bot = src.at(x0, y1, c) * (1.0 - ax) + src.at(x1, y1, c) * ax;
                dst.at(x, y, c) = top * (1.0 - ay) + bot * ay;
            }
        }
    }
    return dst;
}

ReprojectionField reproject_field(const SE3Pose& g_i, const SE3Pose& g_j,
                                  const PinholeCamera& cam, const InverseDepthMap& depth_i) {
    const int w = depth_i.width();
    const int h = depth_i.height();
    ReprojectionField field;
    field.coords = GridV2(w, h, Vec2::Zero());
    field.valid = GridU8(w, h, 0);

    const SE3Pose g_ij = g_j.inverse() * g_i;
    const Mat3 rot = g_ij.rotation_matrix();
    const Vec3 trans = g_ij.translation();

#pragma omp parallel for
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double d = depth_i.values(x, y);
            const Vec3 ray((x - cam.cx) / cam.fx, (y - cam.cy) / cam.fy, 1.0);
            // rot*(ray/d) + t  ==  (rot*ray + t*d) / d; the latter avoids the division.
            const Vec3 scaled = rot * ray + trans * d;
            if (scaled.z() <= 0.0 || d <= 0.0) continue;
            const double iz = 1.0 / scaled.z();
            field.coords(x, y) = Vec2(cam.fx * scaled.x() * iz + cam.cx,
                                      cam.fy * scaled.y() * iz + cam.cy);
            field.valid(x, y) = 1;
        }
    }
    return field;
}

GridV2 identity_grid(int width, int height) {
    GridV2 g(width, height, Vec2::Zero());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) g(x, y) = Vec2(x, y);
    return g;
}

GridF upsample_depth(const GridF& inv_depth, int full_w, int full_h) {
    GridF up = resize_bilinear(inv_depth, full_w, full_h);
    for (size_t i = 0; i < up.size(); ++i) up[i] = up[i] > 0.0 ? 1.0 / up[i] : 0.0;
    return up;
}

GridF upsample_covariance(const GridF& cov, int full_w, int full_h) {
    return resize_bilinear(cov, full_w, full_h);
}

}  // namespace igs
