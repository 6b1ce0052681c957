#include "igslam/mapping.hpp"

#include <algorithm>
#include <cmath>

#include "igslam/errors.hpp"
#include "igslam/geometry.hpp"

namespace igs {

std::vector<PyramidLevel> build_pyramid(const KeyframePacket& packet, double s, int levels) {
    if (levels < 1 || s <= 0.0 || s >= 1.0) throw Error("invalid pyramid parameters");

    std::vector<PyramidLevel> out;
    out.reserve(levels);
    const int w0 = packet.image.width();
    const int h0 = packet.image.height();
    for (int l = 0; l < levels; ++l) {
        PyramidLevel lvl;
        lvl.level = l;
        if (l == 0) {
            lvl.image = packet.image;
            lvl.depth = packet.depth;
            lvl.covariance = packet.depth_covariance;
        } else {
            const double f = std::pow(s, l);
            const int w = static_cast<int>(std::floor(w0 * f));
            const int h = static_cast<int>(std::floor(h0 * f));
            if (w < 1 || h < 1) throw DegenerateLevel();
            lvl.image = resize_bilinear(packet.image, w, h);
            lvl.depth = resize_bilinear(packet.depth, w, h);
            lvl.covariance = resize_bilinear(packet.depth_covariance, w, h);
        }
        out.push_back(std::move(lvl));
    }
    return out;
}

namespace {

// Window spans [i - (k-1)/2, i + k/2], clipped at the borders (width k).
inline void window_bounds(int i, int kernel, int limit, int& lo, int& hi) {
    lo = std::max(0, i - (kernel - 1) / 2);
    hi = std::min(limit - 1, i + kernel / 2);
}

// Separable (rows then columns) running maximum.
GridF maximum_filter(const GridF& in, int kernel) {
    const int w = in.width(), h = in.height();
    GridF rows(w, h, 0.0), out(w, h, 0.0);
#pragma omp parallel for
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int lo, hi;
            window_bounds(x, kernel, w, lo, hi);
            double m = in(lo, y);
            for (int xx = lo + 1; xx <= hi; ++xx) m = std::max(m, in(xx, y));
            rows(x, y) = m;
        }
    }
#pragma omp parallel for
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int lo, hi;
            window_bounds(y, kernel, h, lo, hi);
            double m = rows(x, lo);
            for (int yy = lo + 1; yy <= hi; ++yy) m = std::max(m, rows(x, yy));
            out(x, y) = m;
        }
    }
    return out;
}

// True when set pixels form a strict majority of the in-bounds window.
GridU8 majority_filter(const GridU8& in, int kernel) {
    const int w = in.width(), h = in.height();

    // Column sums of the vertical windows, then horizontal sums over them.
    Grid<int> colsum(w, h, 0);
#pragma omp parallel for
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            int lo, hi;
            window_bounds(y, kernel, h, lo, hi);
            int s = 0;
            for (int yy = lo; yy <= hi; ++yy) s += in(x, yy);
            colsum(x, y) = s;
        }
    }
    GridU8 out(w, h, 0);
#pragma omp parallel for
    for (int y = 0; y < h; ++y) {
        int ylo, yhi;
        window_bounds(y, kernel, h, ylo, yhi);
        const int rows = yhi - ylo + 1;
        for (int x = 0; x < w; ++x) {
            int xlo, xhi;
            window_bounds(x, kernel, w, xlo, xhi);
            int count = 0;
            for (int xx = xlo; xx <= xhi; ++xx) count += colsum(xx, y);
            const int total = rows * (xhi - xlo + 1);
            out(x, y) = (2 * count > total) ? 1 : 0;
        }
    }
    return out;
}

}  // namespace

GridU8 covariance_mask(const GridF& sigma_d, double threshold, int kernel) {
    const int w = sigma_d.width(), h = sigma_d.height();
    double mn = sigma_d[0], mx = sigma_d[0];
    for (size_t i = 1; i < sigma_d.size(); ++i) {
        mn = std::min(mn, sigma_d[i]);
        mx = std::max(mx, sigma_d[i]);
    }

    GridF normalized(w, h, 0.0);
    if (mx > mn) {
        const double range = mx - mn;
        for (size_t i = 0; i < sigma_d.size(); ++i) normalized[i] = (sigma_d[i] - mn) / range;
    }
    // max == min: uniform uncertainty ranks nothing, normalized stays all-zero.

    const GridF filtered = maximum_filter(normalized, kernel);
    GridU8 mask(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) mask(x, y) = filtered(x, y) < threshold ? 1 : 0;
    return majority_filter(mask, kernel);
}

MappingLoss mapping_loss(const RenderedFrame& rendered, const ImageRGB& target_image,
                         const GridF& target_depth, const GridF& depth_covariance, double alpha,
                         double eps) {
    const int w = target_image.width();
    const int h = target_image.height();

    MappingLoss out;
    out.grad_color = ImageRGB(w, h);
    out.grad_depth = GridF(w, h, 0.0);

    double color_sum = 0.0;
    const double color_n = static_cast<double>(w) * h * 3.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double diff = rendered.color.at(x, y, c) - target_image.at(x, y, c);
                color_sum += std::abs(diff);
                const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
                out.grad_color.at(x, y, c) = alpha * sign / color_n;
            }
        }
    }
    out.color_term = color_sum / color_n;

    if (alpha < 1.0) {
        // Count the valid depth pixels first so gradients use the final mean.
        int depth_n = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (target_depth(x, y) > 0.0 && rendered.alpha_acc(x, y) > 0.5) ++depth_n;

        if (depth_n > 0) {
            double depth_sum = 0.0;
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (!(target_depth(x, y) > 0.0 && rendered.alpha_acc(x, y) > 0.5)) continue;
                    const double wgt = 1.0 / (depth_covariance(x, y) + eps);
                    const double diff = rendered.depth(x, y) - target_depth(x, y);
                    depth_sum += std::abs(diff) * wgt;
                    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
                    out.grad_depth(x, y) = (1.0 - alpha) * sign * wgt / depth_n;
                }
            }
            out.depth_term = depth_sum / depth_n;
        }
    }

    out.value = alpha * out.color_term + (1.0 - alpha) * out.depth_term;
    return out;
}

double lr_schedule(double n, double lr_i, double lr_f, double tau) {
    const double t = std::min(n / tau, 1.0);
    return std::exp((1.0 - t) * std::log(lr_i) + t * std::log(lr_f));
}

}  // namespace igs
