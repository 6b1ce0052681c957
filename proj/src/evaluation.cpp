#include "igslam/evaluation.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "igslam/errors.hpp"

namespace igs {

double psnr_db(const ImageRGB& a, const ImageRGB& b) {
    double mse = 0.0;
    const size_t n = a.raw().size();
    for (size_t i = 0; i < n; ++i) {
        const double d = a.raw()[i] - b.raw()[i];
        mse += d * d;
    }
    mse /= static_cast<double>(n);
    if (mse <= 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

namespace {

// 11x11 Gaussian window, sigma 1.5.
constexpr int kSsimRadius = 5;

const std::array<double, 11>& ssim_kernel() {
    static const std::array<double, 11> k = [] {
        std::array<double, 11> w{};
        double sum = 0.0;
        for (int i = -kSsimRadius; i <= kSsimRadius; ++i) {
            w[i + kSsimRadius] = std::exp(-(i * i) / (2.0 * 1.5 * 1.5));
            sum += w[i + kSsimRadius];
        }
        for (double& v : w) v /= sum;
        return w;
    }();
    return k;
}

}  // namespace

double ssim(const ImageRGB& a, const ImageRGB& b) {
    const int w = a.width(), h = a.height();
    const auto& kern = ssim_kernel();
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;

    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        // Per-row partial sums, combined serially: deterministic across thread counts.
        std::vector<double> row_sum(h, 0.0);
#pragma omp parallel for
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double wsum = 0.0, mu_a = 0.0, mu_b = 0.0;
                double saa = 0.0, sbb = 0.0, sab = 0.0;
                for (int dy = -kSsimRadius; dy <= kSsimRadius; ++dy) {
                    const int yy = y + dy;
                    if (yy < 0 || yy >= h) continue;
                    for (int dx = -kSsimRadius; dx <= kSsimRadius; ++dx) {
                        const int xx = x + dx;
                        if (xx < 0 || xx >= w) continue;
                        const double wt = kern[dy + kSsimRadius] * kern[dx + kSsimRadius];
                        const double va = a.at(xx, yy, c);
                        const double vb = b.at(xx, yy, c);
                        wsum += wt;
                        mu_a += wt * va;
                        mu_b += wt * vb;
                        saa += wt * va * va;
                        sbb += wt * vb * vb;
                        sab += wt * va * vb;
                    }
                }
                mu_a /= wsum;
                mu_b /= wsum;
                const double var_a = saa / wsum - mu_a * mu_a;
                const double var_b = sbb / wsum - mu_b * mu_b;
                const double cov = sab / wsum - mu_a * mu_b;
                const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
                const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                row_sum[y] += num / den;
            }
        }
        double channel_sum = 0.0;
        for (double r : row_sum) channel_sum += r;
        total += channel_sum / (static_cast<double>(w) * h);
    }
    return total / 3.0;
}

double depth_l1(const GridF& rendered, const GridF& reference) {
    double sum = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < reference.size(); ++i) {
        if (reference[i] <= 0.0) continue;
        sum += std::abs(rendered[i] - reference[i]);
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

Sim3 fit_sim3(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    if (from.size() < 3 || from.size() != to.size()) throw TooFewPoses();
    Eigen::MatrixXd src(3, from.size()), dst(3, to.size());
    for (size_t i = 0; i < from.size(); ++i) {
        src.col(i) = from[i];
        dst.col(i) = to[i];
    }
    const Eigen::Matrix4d t = Eigen::umeyama(src, dst, true);
    Sim3 out;
    const Mat3 sr = t.topLeftCorner<3, 3>();
    out.scale = std::cbrt(sr.determinant());
    out.rotation = sr / out.scale;
    out.translation = t.topRightCorner<3, 1>();
    return out;
}

double ate_rmse(const std::vector<SE3Pose>& estimated, const std::vector<SE3Pose>& ground_truth,
                bool align) {
    if (estimated.size() < 3 || estimated.size() != ground_truth.size()) throw TooFewPoses();

    std::vector<Vec3> gt_pos, est_pos;
    gt_pos.reserve(ground_truth.size());
    est_pos.reserve(estimated.size());
    for (const auto& p : ground_truth) gt_pos.push_back(p.translation());
    for (const auto& p : estimated) est_pos.push_back(p.translation());

    Sim3 sim;
    if (align) sim = fit_sim3(gt_pos, est_pos);

    double sum = 0.0;
    for (size_t i = 0; i < gt_pos.size(); ++i) {
        sum += (est_pos[i] - sim.apply(gt_pos[i])).squaredNorm();
    }
    return std::sqrt(sum / static_cast<double>(gt_pos.size()));
}

}  // namespace igs
