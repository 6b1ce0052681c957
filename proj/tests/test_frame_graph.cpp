#include <doctest.h>

#include "igslam/errors.hpp"
#include "igslam/frame_graph.hpp"

using namespace igs;

namespace {

FrameGraph graph_with(int n) {
    FrameGraph g;
    for (int i = 0; i < n; ++i) {
        Keyframe kf;
        kf.id = i;
        kf.image = ImageRGB(4, 4);
        kf.depth = InverseDepthMap(2, 2, 1.0);
        kf.feature_handle = i;
        g.insert(std::move(kf));
    }
    return g;
}

}  // namespace

TEST_CASE("keyframe decision is a strict threshold") {
    CHECK(keyframe_decision(5.0, 4.0));
    CHECK_FALSE(keyframe_decision(4.0, 4.0));
    CHECK_FALSE(keyframe_decision(0.0, 4.0));
}

TEST_CASE("local window over 3 keyframes is the complete graph") {
    const FrameGraph g = graph_with(3);
    const EdgeSet edges = g.build_local_window(16, 3);
    const EdgeSet expected = {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}};
    CHECK(edges == expected);
}

TEST_CASE("local window restricts to the most recent keyframes") {
    const FrameGraph g = graph_with(20);
    const EdgeSet edges = g.build_local_window(16, 3);
    for (const auto& [i, j] : edges) {
        CHECK(i >= 4);
        CHECK(j >= 4);
    }
    // Radius bound holds as well.
    for (const auto& [i, j] : edges) CHECK(std::abs(i - j) <= 3);
}

TEST_CASE("local window needs two keyframes") {
    const FrameGraph g = graph_with(1);
    CHECK_THROWS_AS(g.build_local_window(16), InsufficientKeyframes);
}

TEST_CASE("global graph without close pairs is the chain") {
    const FrameGraph g = graph_with(4);
    const EdgeSet edges =
        g.build_global_graph([](int, int) { return 100.0; }, 16.0);
    const EdgeSet expected = {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}};
    CHECK(edges == expected);
}

TEST_CASE("global graph adds proximity edges") {
    const FrameGraph g = graph_with(4);
    const EdgeSet edges = g.build_global_graph(
        [](int i, int j) { return (i == 0 && j == 3) ? 5.0 : 100.0; }, 16.0);
    CHECK(edges.count({0, 3}) == 1);
    CHECK(edges.count({3, 0}) == 1);
    // Chain always present.
    for (int i = 0; i + 1 < 4; ++i) {
        CHECK(edges.count({i, i + 1}) == 1);
        CHECK(edges.count({i + 1, i}) == 1);
    }
}

TEST_CASE("global graph needs two keyframes") {
    const FrameGraph g = graph_with(1);
    CHECK_THROWS_AS(g.build_global_graph([](int, int) { return 0.0; }, 1.0),
                    InsufficientKeyframes);
}

TEST_CASE("audit accepts graphs built by the builders") {
    FrameGraph g = graph_with(6);
    g.set_edges(g.build_local_window(4, 2));
    g.audit();
    g.set_edges(g.build_global_graph([](int, int) { return 1.0; }, 16.0));
    g.audit();
}

TEST_CASE("audit rejects asymmetric edge sets and self-edges") {
    FrameGraph g = graph_with(3);
    g.set_edges({{0, 1}});
    CHECK_THROWS_AS(g.audit(), Error);
    g.set_edges({{1, 1}});
    CHECK_THROWS_AS(g.audit(), Error);
}

TEST_CASE("insert rejects non-monotone ids") {
    FrameGraph g = graph_with(2);
    Keyframe kf;
    kf.id = 1;
    kf.image = ImageRGB(4, 4);
    CHECK_THROWS_AS(g.insert(std::move(kf)), Error);
}
