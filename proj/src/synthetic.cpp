#include "igslam/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "igslam/errors.hpp"
#include "igslam/png_io.hpp"
#include "igslam/rasterizer.hpp"

namespace igs {

namespace {

SE3Pose look_at(const Vec3& eye, const Vec3& target) {
    const Vec3 forward = (target - eye).normalized();
    const Vec3 down_hint(0.0, 1.0, 0.0);
    Vec3 right = down_hint.cross(forward);
    if (right.norm() < 1e-9) right = Vec3(1.0, 0.0, 0.0);
    right.normalize();
    const Vec3 down = forward.cross(right);
    Mat3 r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    return SE3Pose(Eigen::Quaterniond(r), eye);
}

std::vector<SE3Pose> make_trajectory(const SceneSpec& spec) {
    std::vector<SE3Pose> poses;
    poses.reserve(spec.frames);
    const int n = spec.frames;
    for (int k = 0; k < n; ++k) {
        if (spec.trajectory == SceneSpec::Trajectory::line) {
            const double x = (k - 0.5 * (n - 1)) * spec.line_step;
            poses.push_back(SE3Pose(Eigen::Quaterniond::Identity(), Vec3(x, 0.0, -spec.orbit_radius)));
            continue;
        }
        // Orbit; the loop variant revisits the start pose exactly.
        const double denom = spec.trajectory == SceneSpec::Trajectory::loop ? n - 1 : n;
        const double theta = 2.0 * M_PI * k / denom;
        const Vec3 eye(spec.orbit_radius * std::sin(theta), spec.orbit_bob * std::sin(2.0 * theta),
                       -spec.orbit_radius * std::cos(theta));
        poses.push_back(look_at(eye, Vec3::Zero()));
    }
    return poses;
}

Vec3 face_color(int face, int iu, int iv, double u_frac) {
    static const Vec3 base[6] = {{0.85, 0.30, 0.25}, {0.25, 0.65, 0.90}, {0.90, 0.80, 0.30},
                                 {0.50, 0.85, 0.40}, {0.80, 0.45, 0.75}, {0.40, 0.75, 0.70}};
    const int checker = ((iu / 3) + (iv / 3)) % 2;
    Vec3 c = base[face] * (0.55 + 0.35 * checker) + Vec3::Constant(0.10 * u_frac);
    return c.cwiseMax(0.0).cwiseMin(1.0);
}

GaussianCloud make_box_splats(const SceneSpec& spec, std::mt19937_64& rng) {
    GaussianCloud cloud;
    const double h = spec.box_half_extent;
    const int m = spec.splats_per_face_side;
    const double spacing = 2.0 * h / m;
    std::uniform_real_distribution<double> jitter(-0.1 * spacing, 0.1 * spacing);
    std::uniform_real_distribution<double> cjit(-0.02, 0.02);

    const Vec3 normals[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (int f = 0; f < 6; ++f) {
        const Vec3 n = normals[f];
        const Vec3 t1 = (std::abs(n.x()) < 0.5 ? Vec3(1, 0, 0) : Vec3(0, 1, 0)).cross(n).normalized();
        const Vec3 t2 = n.cross(t1);
        for (int iu = 0; iu < m; ++iu) {
            for (int iv = 0; iv < m; ++iv) {
                const double u = (iu + 0.5) * spacing - h + jitter(rng);
                const double v = (iv + 0.5) * spacing - h + jitter(rng);
                Gaussian3D g;
                g.position = n * h + t1 * u + t2 * v;
                g.rotation = Eigen::Quaterniond::FromTwoVectors(Vec3(0, 0, 1), n);
                g.log_scale = Vec3(std::log(spacing * 0.6), std::log(spacing * 0.6),
                                   std::log(spacing * 0.15));
                g.opacity_logit = 3.476;  // opacity ~0.97
                g.color = (face_color(f, iu, iv, (u + h) / (2.0 * h)) +
                           Vec3(cjit(rng), cjit(rng), cjit(rng)))
                              .cwiseMax(0.0)
                              .cwiseMin(1.0);
                cloud.add(g);
            }
        }
    }
    return cloud;
}

GaussianCloud make_random_splats(const SceneSpec& spec, std::mt19937_64& rng) {
    GaussianCloud cloud;
    std::uniform_real_distribution<double> pos(-spec.box_half_extent, spec.box_half_extent);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> logs(std::log(0.02), std::log(0.12));
    for (int i = 0; i < spec.random_gaussian_count; ++i) {
        Gaussian3D g;
        g.position = Vec3(pos(rng), pos(rng), pos(rng));
        g.rotation = Eigen::Quaterniond(Eigen::Vector4d(unit(rng) - 0.5, unit(rng) - 0.5,
                                                        unit(rng) - 0.5, unit(rng) - 0.5)
                                            .normalized());
        g.log_scale = Vec3(logs(rng), logs(rng), logs(rng));
        g.opacity_logit = 2.0 + 2.0 * unit(rng);
        g.color = Vec3(unit(rng), unit(rng), unit(rng));
        cloud.add(g);
    }
    return cloud;
}

}  // namespace

double ray_box_depth(const SE3Pose& pose, const PinholeCamera& cam, double px, double py,
                     double half_extent) {
    // Direction with unit camera z so the slab parameter equals camera depth.
    const Vec3 dir_cam((px - cam.cx) / cam.fx, (py - cam.cy) / cam.fy, 1.0);
    const Vec3 origin = pose.translation();
    const Vec3 dir = pose.rotation_matrix() * dir_cam;

    double tmin = 0.0;
    double tmax = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(dir(a)) < 1e-12) {
            if (std::abs(origin(a)) > half_extent) return 0.0;
            continue;
        }
        double t0 = (-half_extent - origin(a)) / dir(a);
        double t1 = (half_extent - origin(a)) / dir(a);
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
    }
    if (tmax < tmin || tmax <= 0.0) return 0.0;
    return tmin > 0.0 ? tmin : 0.0;  // camera inside the box counts as a miss
}

GridF SyntheticScene::geometry_depth(int frame_index, int width, int height) const {
    const PinholeCamera cam = scaled_camera(spec.camera, width, height);
    const SE3Pose& pose = frames[frame_index].pose;
    GridF depth(width, height, 0.0);
    if (spec.geometry == SceneSpec::Geometry::box) {
#pragma omp parallel for
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                depth(x, y) = ray_box_depth(pose, cam, x, y, spec.box_half_extent);
    } else {
        const RenderedFrame r = rasterize(splats, pose.inverse(), cam);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                depth(x, y) = r.alpha_acc(x, y) > 0.5 ? r.depth(x, y) : 0.0;
    }
    return depth;
}

SolverDepth SyntheticScene::solver_inverse_depth(int frame_index, int solver_w, int solver_h) const {
    const GridF depth = geometry_depth(frame_index, solver_w, solver_h);
    SolverDepth out;
    out.inverse_depth = GridF(solver_w, solver_h, 1.0);
    out.valid = GridU8(solver_w, solver_h, 0);
    for (int y = 0; y < solver_h; ++y) {
        for (int x = 0; x < solver_w; ++x) {
            if (depth(x, y) > 0.0) {
                out.inverse_depth(x, y) = 1.0 / depth(x, y);
                out.valid(x, y) = 1;
            }
        }
    }
    return out;
}

SyntheticScene generate_scene(const SceneSpec& spec, uint64_t seed) {
    if (spec.frames < 1 || !spec.camera.valid() || spec.box_half_extent <= 0.0)
        throw InvalidSpec();
    if (spec.geometry == SceneSpec::Geometry::box && spec.splats_per_face_side < 1)
        throw InvalidSpec();

    SyntheticScene scene;
    scene.spec = spec;
    std::mt19937_64 rng(seed);
    scene.splats = spec.geometry == SceneSpec::Geometry::box ? make_box_splats(spec, rng)
                                                             : make_random_splats(spec, rng);

    const auto poses = make_trajectory(spec);
    scene.frames.resize(spec.frames);
    for (int k = 0; k < spec.frames; ++k) {
        SyntheticFrame& frame = scene.frames[k];
        frame.timestamp = k / spec.fps;
        frame.pose = poses[k];
        RenderedFrame r = rasterize(scene.splats, frame.pose.inverse(), spec.camera);
        frame.image = std::move(r.color);
        quantize_to_8bit(frame.image);
    }
    // Depth after poses are final; box scenes use the exact geometry.
    for (int k = 0; k < spec.frames; ++k) {
        scene.frames[k].depth = scene.geometry_depth(k, spec.camera.width, spec.camera.height);
        quantize_depth(scene.frames[k].depth, spec.depth_scale);
    }
    return scene;
}

void save_scene(const SyntheticScene& scene, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "rgb");
    fs::create_directories(fs::path(dir) / "depth");

    std::ofstream manifest(fs::path(dir) / "manifest.txt");
    if (!manifest) throw Error("cannot write manifest in " + dir);
    manifest.precision(std::numeric_limits<double>::max_digits10);
    const PinholeCamera& cam = scene.spec.camera;
    manifest << "igslam_synthetic 1\n";
    manifest << "width " << cam.width << "\nheight " << cam.height << "\n";
    manifest << "fx " << cam.fx << "\nfy " << cam.fy << "\ncx " << cam.cx << "\ncy " << cam.cy << "\n";
    manifest << "depth_scale " << scene.spec.depth_scale << "\n";
    manifest << "frames " << scene.frames.size() << "\n";

    char name[64];
    for (size_t k = 0; k < scene.frames.size(); ++k) {
        const SyntheticFrame& f = scene.frames[k];
        std::snprintf(name, sizeof(name), "%06zu.png", k);
        const std::string rgb_rel = std::string("rgb/") + name;
        const std::string depth_rel = std::string("depth/") + name;
        save_png_rgb8((fs::path(dir) / rgb_rel).string(), f.image);
        save_png_depth16((fs::path(dir) / depth_rel).string(), f.depth, scene.spec.depth_scale);

        const auto& q = f.pose.rotation();
        const auto& t = f.pose.translation();
        manifest << "frame " << f.timestamp << ' ' << rgb_rel << ' ' << depth_rel << ' ' << t.x()
                 << ' ' << t.y() << ' ' << t.z() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z()
                 << ' ' << q.w() << "\n";
    }
}

}  // namespace igs
