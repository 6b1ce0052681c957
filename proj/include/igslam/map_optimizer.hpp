#pragma once

#include <deque>
#include <random>

#include "igslam/mapping.hpp"
#include "igslam/splat.hpp"

namespace igs {

// Adam moments per Gaussian, tracked in parallel with the cloud.
struct AdamSlot {
    GaussianGrads m;
    GaussianGrads v;
    int step = 0;
};

// The Gaussian map plus everything the incremental optimizer carries between
// window cycles: optimizer moments, densification statistics, and the global
// iteration counter driving the decay schedule.
struct MapState {
    GaussianCloud cloud;
    std::vector<AdamSlot> adam;

    // Densification statistics since the last densify event.
    std::vector<double> grad2d_accum;
    std::vector<int> grad2d_count;
    std::vector<Vec3> grad_pos_accum;

    // Gaussians seeded during the current window cycle and whether they were
    // ever visible from their seeding keyframe.
    std::vector<uint8_t> seeded_this_window;
    std::vector<uint8_t> seen_from_seed_view;

    long long global_iteration = 0;

    size_t size() const { return cloud.size(); }
    void append(const Gaussian3D& g, bool seeded_now);
    void remove_flagged(const std::vector<uint8_t>& flags);
    void reset_densify_stats();
};

// Seeds ceil(valid/theta) Gaussians from mask-true pixels of the level,
// sampled uniformly without replacement. Positions unproject through the
// level depth; scales are isotropic from the mean distance to the nearest
// seeded neighbours. Throws EmptyMask when no pixel is available.
std::vector<Gaussian3D> seed_gaussians(const KeyframePacket& packet, const PyramidLevel& level,
                                       const PinholeCamera& full_camera, int theta,
                                       const GridU8& mask, double seed_opacity,
                                       std::mt19937_64& rng);

struct DensifyReport {
    int split = 0;
    int cloned = 0;
    int pruned_opacity = 0;
    int pruned_occluded = 0;
};

// Cadence pass: splits/clones high-gradient Gaussians and removes those with
// opacity below the prune threshold. Resets the densification statistics.
DensifyReport densify_and_prune(MapState& map, const MappingConfig& cfg);

// Window-end pass: removes Gaussians seeded in this window that were never
// visible from the seeding keyframe.
DensifyReport prune_occluded(MapState& map, const KeyframePacket& newest,
                             const PinholeCamera& full_camera);

// Coarse-to-fine optimization over the sliding window. Seeds from the most
// recent packet at the start of each level, renders one window keyframe per
// iteration round-robin, and applies per-group Adam updates with the position
// learning rate following the decay schedule.
void optimize_window(MapState& map, const std::deque<KeyframePacket>& window,
                     const PinholeCamera& full_camera, const MappingConfig& cfg, int budget,
                     std::mt19937_64& rng);

// Refinement: beta iterations, each rendering one uniformly drawn keyframe at
// full resolution with the same loss and update rule.
void post_process(MapState& map, const std::vector<KeyframePacket>& keyframes,
                  const PinholeCamera& full_camera, const MappingConfig& cfg, int beta,
                  std::mt19937_64& rng);

// One render + loss + Adam step against a single packet level. Returns the
// loss. Shared by optimize_window and post_process.
double mapping_step(MapState& map, const KeyframePacket& packet_pose_source,
                    const ImageRGB& target_image, const GridF& target_depth,
                    const GridF& target_cov, const PinholeCamera& level_camera,
                    const MappingConfig& cfg);

}  // namespace igs
