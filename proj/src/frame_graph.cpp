#include "igslam/frame_graph.hpp"

#include <algorithm>

#include "igslam/errors.hpp"

namespace igs {

void FrameGraph::insert(Keyframe kf) {
    if (!keyframes_.empty()) {
        if (kf.id <= keyframes_.back().id)
            throw Error("keyframe ids must be monotone in insertion order");
        const auto& first = keyframes_.front();
        if (kf.image.width() != first.image.width() || kf.image.height() != first.image.height())
            throw Error("keyframe image dimensions must be constant across a run");
    }
    keyframes_.push_back(std::move(kf));
}

const Keyframe& FrameGraph::keyframe(int id) const {
    for (const auto& kf : keyframes_)
        if (kf.id == id) return kf;
    throw Error("unknown keyframe id " + std::to_string(id));
}

Keyframe& FrameGraph::keyframe(int id) {
    return const_cast<Keyframe&>(std::as_const(*this).keyframe(id));
}

EdgeSet FrameGraph::build_local_window(int window, int radius) const {
    if (keyframes_.size() < 2) throw InsufficientKeyframes();
    EdgeSet edges;
    const int n = static_cast<int>(keyframes_.size());
    const int start = std::max(0, n - window);
    for (int a = start; a < n; ++a) {
        for (int b = a + 1; b < n && b <= a + radius; ++b) {
            const int i = keyframes_[a].id;
            const int j = keyframes_[b].id;
            edges.emplace(i, j);
            edges.emplace(j, i);
        }
    }
    return edges;
}

EdgeSet FrameGraph::build_global_graph(const std::function<double(int, int)>& flow_distance,
                                       double proximity_threshold) const {
    if (keyframes_.size() < 2) throw InsufficientKeyframes();
    EdgeSet edges;
    const int n = static_cast<int>(keyframes_.size());
    for (int a = 0; a + 1 < n; ++a) {
        edges.emplace(keyframes_[a].id, keyframes_[a + 1].id);
        edges.emplace(keyframes_[a + 1].id, keyframes_[a].id);
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a + 2; b < n; ++b) {
            const int i = keyframes_[a].id;
            const int j = keyframes_[b].id;
            if (flow_distance(i, j) < proximity_threshold) {
                edges.emplace(i, j);
                edges.emplace(j, i);
            }
        }
    }
    return edges;
}

void FrameGraph::audit() const {
    for (size_t k = 1; k < keyframes_.size(); ++k) {
        if (keyframes_[k].id <= keyframes_[k - 1].id)
            throw Error("audit: keyframe ids not monotone");
    }
    for (const auto& [i, j] : edges_) {
        if (i == j) throw Error("audit: self-edge");
        keyframe(i);
        keyframe(j);
        if (!edges_.count({j, i})) throw Error("audit: edge set not symmetric");
    }
}

}  // namespace igs
