#pragma once

#include <optional>
#include <string>
#include <vector>

#include "igslam/camera.hpp"
#include "igslam/grid.hpp"
#include "igslam/se3.hpp"

namespace igs {

struct DatasetFrame {
    double timestamp = 0.0;
    ImageRGB image;
    std::optional<SE3Pose> gt_pose;
    std::optional<GridF> gt_depth;  // scene units, 0 invalid
};

struct Dataset {
    PinholeCamera camera;
    std::vector<DatasetFrame> frames;  // timestamps strictly increasing
};

// format "synthetic": reads manifest.txt (self-describing, with intrinsics).
// format "tum": reads rgb.txt associations and the optional groundtruth.txt
// (nearest timestamp within 0.02 s); intrinsics must be supplied.
// Throws MissingIndex when the index file is absent, MalformedLine on parse
// errors, DatasetError otherwise.
Dataset load_dataset(const std::string& dir, const std::string& format,
                     const PinholeCamera* tum_intrinsics = nullptr);

}  // namespace igs
