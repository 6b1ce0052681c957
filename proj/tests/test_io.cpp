#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "igslam/config.hpp"
#include "igslam/dataset.hpp"
#include "igslam/errors.hpp"
#include "igslam/png_io.hpp"
#include "igslam/splat_io.hpp"

using namespace igs;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("igslam_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parses, serializes, and hashes stably") {
    const Config cfg = Config::from_string(
        "# comment\n"
        "keyframe_flow_threshold_px 4.0\n"
        "local_window 16   # trailing comment\n"
        "mode interleaved\n");
    CHECK(cfg.get_double("keyframe_flow_threshold_px", 0.0) == 4.0);
    CHECK(cfg.get_int("local_window", 0) == 16);
    CHECK(cfg.get_string("mode", "") == "interleaved");
    CHECK(cfg.get_double("absent", 7.5) == 7.5);

    const Config again = Config::from_string(cfg.serialize());
    CHECK(again.hash() == cfg.hash());
}

TEST_CASE("config rejects malformed lines") {
    CHECK_THROWS_AS(Config::from_string("key_without_value\n"), MalformedLine);
    CHECK_THROWS_AS(Config::from_string("key value extra\n"), MalformedLine);
    try {
        Config::from_string("a 1\nb\n");
    } catch (const MalformedLine& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("rgb png roundtrip is bit-exact after quantization") {
    const fs::path dir = temp_dir("png");
    ImageRGB img(33, 21);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : img.raw()) v = u(rng);
    quantize_to_8bit(img);

    const std::string path = (dir / "img.png").string();
    save_png_rgb8(path, img);
    const ImageRGB back = load_png_rgb8(path);
    CHECK(back == img);
}

TEST_CASE("depth png roundtrip is bit-exact after quantization") {
    const fs::path dir = temp_dir("depth");
    GridF depth(17, 13, 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.5, 8.0);
    for (size_t i = 0; i < depth.size(); ++i) depth[i] = i % 7 == 0 ? 0.0 : u(rng);
    quantize_depth(depth, 5000.0);

    const std::string path = (dir / "d.png").string();
    save_png_depth16(path, depth, 5000.0);
    const GridF back = load_png_depth16(path, 5000.0);
    CHECK(back == depth);
}

TEST_CASE("gaussian cloud file roundtrip") {
    const fs::path dir = temp_dir("igs");
    GaussianCloud cloud;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 37; ++i) {
        Gaussian3D g;
        g.position = Vec3(u(rng), u(rng), u(rng) + 2.0);
        g.rotation = Eigen::Quaterniond(Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng)).normalized());
        g.log_scale = Vec3(u(rng), u(rng), u(rng));
        g.opacity_logit = u(rng);
        g.color = Vec3(0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng));
        cloud.add(g);
    }

    const std::string path = (dir / "map.igs").string();
    save_gaussians(path, cloud);

    // Header is text, payload float32 records.
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    size_t count;
    in >> magic >> count;
    CHECK(magic == "IGS1");
    CHECK(count == cloud.size());

    const GaussianCloud back = load_gaussians(path);
    REQUIRE(back.size() == cloud.size());
    for (size_t i = 0; i < cloud.size(); ++i) {
        CHECK((back[i].position - cloud[i].position).norm() < 1e-6);
        CHECK((back[i].log_scale - cloud[i].log_scale).norm() < 1e-6);
        CHECK(std::abs(back[i].opacity_logit - cloud[i].opacity_logit) < 1e-6);
        CHECK((back[i].color - cloud[i].color).norm() < 1e-6);
        CHECK(std::abs(std::abs(back[i].rotation.dot(cloud[i].rotation)) - 1.0) < 1e-6);
    }
}

TEST_CASE("gaussian loader rejects bad headers and truncation") {
    const fs::path dir = temp_dir("igs_bad");
    {
        std::ofstream out(dir / "bad.igs", std::ios::binary);
        out << "NOPE 3\n";
    }
    CHECK_THROWS_AS(load_gaussians((dir / "bad.igs").string()), Error);
    {
        std::ofstream out(dir / "trunc.igs", std::ios::binary);
        out << "IGS1 2\n";
        const float one = 1.0f;
        out.write(reinterpret_cast<const char*>(&one), sizeof(one));
    }
    CHECK_THROWS_AS(load_gaussians((dir / "trunc.igs").string()), Error);
}

TEST_CASE("tum dataset layout loads with pose association") {
    const fs::path dir = temp_dir("tum");
    fs::create_directories(dir / "rgb");
    ImageRGB img(8, 6);
    save_png_rgb8((dir / "rgb" / "0.png").string(), img);
    save_png_rgb8((dir / "rgb" / "1.png").string(), img);
    {
        std::ofstream rgb(dir / "rgb.txt");
        rgb << "# timestamp filename\n";
        rgb << "100.0 rgb/0.png\n";
        rgb << "100.5 rgb/1.png\n";
    }
    {
        std::ofstream gt(dir / "groundtruth.txt");
        gt << "# ts tx ty tz qx qy qz qw\n";
        gt << "100.01 1 2 3 0 0 0 1\n";
        gt << "100.55 4 5 6 0 0 0 1\n";  // 0.05s away: outside tolerance
    }

    PinholeCamera cam{10.0, 10.0, 4.0, 3.0, 8, 6};
    const Dataset ds = load_dataset(dir.string(), "tum", &cam);
    REQUIRE(ds.frames.size() == 2);
    CHECK(ds.frames[0].timestamp == 100.0);
    REQUIRE(ds.frames[0].gt_pose.has_value());
    CHECK((ds.frames[0].gt_pose->translation() - Vec3(1, 2, 3)).norm() < 1e-12);
    CHECK_FALSE(ds.frames[1].gt_pose.has_value());
}

TEST_CASE("tum loader reports missing index and malformed lines") {
    const fs::path dir = temp_dir("tum_bad");
    PinholeCamera cam{10.0, 10.0, 4.0, 3.0, 8, 6};
    CHECK_THROWS_AS(load_dataset(dir.string(), "tum", &cam), DatasetError);  // no directory

    fs::create_directories(dir);
    CHECK_THROWS_AS(load_dataset(dir.string(), "tum", &cam), MissingIndex);

    {
        std::ofstream rgb(dir / "rgb.txt");
        rgb << "100.0\n";  // filename missing
    }
    try {
        load_dataset(dir.string(), "tum", &cam);
        CHECK(false);
    } catch (const MalformedLine& e) {
        CHECK(e.line == 1);
    }
}

TEST_CASE("malformed groundtruth quaternion line carries its number") {
    const fs::path dir = temp_dir("tum_gt_bad");
    fs::create_directories(dir / "rgb");
    ImageRGB img(8, 6);
    save_png_rgb8((dir / "rgb" / "0.png").string(), img);
    {
        std::ofstream rgb(dir / "rgb.txt");
        rgb << "100.0 rgb/0.png\n";
    }
    {
        std::ofstream gt(dir / "groundtruth.txt");
        gt << "100.0 1 2 3 0 0 1\n";  // one quaternion component short
    }
    PinholeCamera cam{10.0, 10.0, 4.0, 3.0, 8, 6};
    try {
        load_dataset(dir.string(), "tum", &cam);
        CHECK(false);
    } catch (const MalformedLine& e) {
        CHECK(e.line == 1);
    }
}
