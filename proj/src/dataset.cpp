#include "igslam/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "igslam/errors.hpp"
#include "igslam/png_io.hpp"

namespace igs {

namespace fs = std::filesystem;

namespace {

constexpr double kAssociationTolerance = 0.02;  // seconds

struct TimedPose {
    double timestamp;
    SE3Pose pose;
};

std::vector<TimedPose> load_tum_groundtruth(const fs::path& path) {
    std::vector<TimedPose> poses;
    std::ifstream in(path);
    if (!in) return poses;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double ts, tx, ty, tz, qx, qy, qz, qw;
        if (!(ls >> ts >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
            throw MalformedLine(line_no, "groundtruth.txt");
        TimedPose tp;
        tp.timestamp = ts;
        tp.pose = SE3Pose(Eigen::Quaterniond(qw, qx, qy, qz), Vec3(tx, ty, tz));
        poses.push_back(tp);
    }
    return poses;
}

std::optional<SE3Pose> associate_pose(const std::vector<TimedPose>& poses, double ts) {
    if (poses.empty()) return std::nullopt;
    auto it = std::lower_bound(poses.begin(), poses.end(), ts,
                               [](const TimedPose& p, double t) { return p.timestamp < t; });
    double best_dt = std::numeric_limits<double>::infinity();
    const TimedPose* best = nullptr;
    if (it != poses.end() && std::abs(it->timestamp - ts) < best_dt) {
        best_dt = std::abs(it->timestamp - ts);
        best = &*it;
    }
    if (it != poses.begin()) {
        const TimedPose& prev = *std::prev(it);
        if (std::abs(prev.timestamp - ts) < best_dt) {
            best_dt = std::abs(prev.timestamp - ts);
            best = &prev;
        }
    }
    if (best && best_dt <= kAssociationTolerance) return best->pose;
    return std::nullopt;
}

Dataset load_tum(const std::string& dir, const PinholeCamera* intrinsics) {
    const fs::path root(dir);
    const fs::path index = root / "rgb.txt";
    if (!fs::exists(index)) throw MissingIndex("missing rgb.txt in " + dir);
    if (!intrinsics) throw DatasetError("tum datasets need intrinsics in the config");

    Dataset ds;
    ds.camera = *intrinsics;
    const auto gt = load_tum_groundtruth(root / "groundtruth.txt");

    std::ifstream in(index);
    std::string line;
    int line_no = 0;
    double last_ts = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double ts;
        std::string filename;
        if (!(ls >> ts >> filename)) throw MalformedLine(line_no, "rgb.txt");
        if (ts <= last_ts) throw MalformedLine(line_no, "rgb.txt timestamps not increasing");
        last_ts = ts;

        DatasetFrame frame;
        frame.timestamp = ts;
        frame.image = load_png_rgb8((root / filename).string());
        frame.gt_pose = associate_pose(gt, ts);
        ds.frames.push_back(std::move(frame));
    }
    return ds;
}

Dataset load_synthetic(const std::string& dir) {
    const fs::path root(dir);
    const fs::path index = root / "manifest.txt";
    if (!fs::exists(index)) throw MissingIndex("missing manifest.txt in " + dir);

    std::ifstream in(index);
    std::string line;
    int line_no = 0;

    Dataset ds;
    double depth_scale = 5000.0;
    double last_ts = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "igslam_synthetic" || key == "frames") {
            continue;  // version / count markers
        } else if (key == "width") {
            ls >> ds.camera.width;
        } else if (key == "height") {
            ls >> ds.camera.height;
        } else if (key == "fx") {
            ls >> ds.camera.fx;
        } else if (key == "fy") {
            ls >> ds.camera.fy;
        } else if (key == "cx") {
            ls >> ds.camera.cx;
        } else if (key == "cy") {
            ls >> ds.camera.cy;
        } else if (key == "depth_scale") {
            ls >> depth_scale;
        } else if (key == "frame") {
            double ts, tx, ty, tz, qx, qy, qz, qw;
            std::string rgb_rel, depth_rel;
            if (!(ls >> ts >> rgb_rel >> depth_rel >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
                throw MalformedLine(line_no, "manifest.txt");
            if (ts <= last_ts) throw MalformedLine(line_no, "manifest timestamps not increasing");
            last_ts = ts;
            DatasetFrame frame;
            frame.timestamp = ts;
            frame.image = load_png_rgb8((root / rgb_rel).string());
            frame.gt_depth = load_png_depth16((root / depth_rel).string(), depth_scale);
            frame.gt_pose = SE3Pose(Eigen::Quaterniond(qw, qx, qy, qz), Vec3(tx, ty, tz));
            ds.frames.push_back(std::move(frame));
        } else {
            throw MalformedLine(line_no, "manifest.txt: unknown key " + key);
        }
        if (!ls) throw MalformedLine(line_no, "manifest.txt");
    }
    if (!ds.camera.valid()) throw DatasetError("manifest is missing camera intrinsics");
    return ds;
}

}  // namespace

Dataset load_dataset(const std::string& dir, const std::string& format,
                     const PinholeCamera* tum_intrinsics) {
    if (!fs::exists(dir)) throw DatasetError("dataset directory does not exist: " + dir);
    if (format == "tum") return load_tum(dir, tum_intrinsics);
    if (format == "synthetic") return load_synthetic(dir);
    throw DatasetError("unknown dataset format: " + format);
}

}  // namespace igs
