#pragma once

#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "igslam/geometry.hpp"
#include "igslam/grid.hpp"
#include "igslam/se3.hpp"

namespace igs {

// A selected camera frame carrying the optimizable tracking state.
struct Keyframe {
    int id = -1;
    ImageRGB image;             // full resolution, values in [0, 1]
    SE3Pose pose;               // camera-to-world
    InverseDepthMap depth;      // solver resolution
    int feature_handle = -1;    // opaque reference for the flow provider
};

using EdgeSet = std::set<std::pair<int, int>>;

// Keyframe store plus the covisibility edges the solver runs over.
// Single-writer; snapshots of the edge set are plain copies.
class FrameGraph {
public:
    void insert(Keyframe kf);

    const std::vector<Keyframe>& keyframes() const { return keyframes_; }
    std::vector<Keyframe>& keyframes() { return keyframes_; }
    const Keyframe& keyframe(int id) const;
    Keyframe& keyframe(int id);
    size_t size() const { return keyframes_.size(); }

    const EdgeSet& edges() const { return edges_; }
    void set_edges(EdgeSet e) { edges_ = std::move(e); }

    // Edges among the most recent `window` keyframes, each connected to its
    // `radius` nearest neighbours by id on each side. Symmetric edge set.
    EdgeSet build_local_window(int window, int radius = 3) const;

    // Chain edges (i, i+1) for all consecutive pairs plus (i, j) whenever
    // flow_distance(i, j) < proximity_threshold. Symmetric edge set.
    EdgeSet build_global_graph(const std::function<double(int, int)>& flow_distance,
                               double proximity_threshold) const;

    // Verifies the structural invariants; throws Error on violation.
    void audit() const;

private:
    std::vector<Keyframe> keyframes_;  // ordered by id
    EdgeSet edges_;
};

// True iff the mean optical-flow magnitude strictly exceeds the threshold.
inline bool keyframe_decision(double mean_flow_magnitude, double threshold) {
    return mean_flow_magnitude > threshold;
}

}  // namespace igs
