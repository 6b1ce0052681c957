// Benchmarks comparing the tiled OpenMP kernels against the serial reference.

#include <benchmark/benchmark.h>

#include <random>

#include "igslam/rasterizer.hpp"

namespace {

igs::GaussianCloud make_scene(int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    igs::GaussianCloud cloud;
    for (int i = 0; i < count; ++i) {
        igs::Gaussian3D g;
        g.position = igs::Vec3(u(rng), u(rng), 2.0 + 2.0 * unit(rng));
        g.rotation = Eigen::Quaterniond(
            Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng)).normalized());
        g.log_scale = igs::Vec3::Constant(std::log(0.02 + 0.05 * unit(rng)));
        g.opacity_logit = 1.0 + 2.0 * unit(rng);
        g.color = igs::Vec3(unit(rng), unit(rng), unit(rng));
        cloud.add(g);
    }
    return cloud;
}

igs::PinholeCamera bench_cam() { return {320.0, 320.0, 159.5, 119.5, 320, 240}; }

void bm_rasterize_tiled(benchmark::State& state) {
    const auto cloud = make_scene(static_cast<int>(state.range(0)), 1);
    const auto cam = bench_cam();
    for (auto _ : state) {
        auto frame = igs::rasterize(cloud, igs::SE3Pose(), cam);
        benchmark::DoNotOptimize(frame.alpha_acc.data());
    }
}

void bm_rasterize_reference(benchmark::State& state) {
    const auto cloud = make_scene(static_cast<int>(state.range(0)), 1);
    const auto cam = bench_cam();
    for (auto _ : state) {
        auto frame = igs::rasterize_reference(cloud, igs::SE3Pose(), cam);
        benchmark::DoNotOptimize(frame.alpha_acc.data());
    }
}

void bm_rasterize_backward(benchmark::State& state) {
    const auto cloud = make_scene(static_cast<int>(state.range(0)), 1);
    const auto cam = bench_cam();
    igs::ImageRGB grad_color(cam.width, cam.height);
    for (auto& v : grad_color.raw()) v = 1e-3;
    const igs::GridF grad_depth(cam.width, cam.height, 1e-3);
    for (auto _ : state) {
        auto grads = igs::rasterize_backward(cloud, igs::SE3Pose(), cam, grad_color, grad_depth);
        benchmark::DoNotOptimize(grads.grads.data());
    }
}

}  // namespace

BENCHMARK(bm_rasterize_tiled)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_rasterize_reference)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_rasterize_backward)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
