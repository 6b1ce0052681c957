#pragma once

#include <string>

#include "igslam/splat.hpp"

namespace igs {

// Point-cloud export: text header "IGS1 <count>\n" followed by little-endian
// float32 records: position(3), rotation quaternion w-first(4), log-scale(3),
// opacity logit(1), color(3).
void save_gaussians(const std::string& path, const GaussianCloud& cloud);
GaussianCloud load_gaussians(const std::string& path);

}  // namespace igs
