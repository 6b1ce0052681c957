#pragma once

#include <string>

#include "igslam/grid.hpp"

namespace igs {

// 8-bit RGB PNG; values quantized with round(v * 255) on save, divided back on
// load, so quantized images round-trip bit-exactly.
void save_png_rgb8(const std::string& path, const ImageRGB& image);
ImageRGB load_png_rgb8(const std::string& path);

// 16-bit grayscale PNG for depth; value = round(depth * scale), 0 = invalid.
void save_png_depth16(const std::string& path, const GridF& depth, double scale);
GridF load_png_depth16(const std::string& path, double scale);

// Quantize in place to the 8-bit grid (k / 255).
void quantize_to_8bit(ImageRGB& image);
// Quantize in place to the 16-bit depth grid (round(d * scale) / scale).
void quantize_depth(GridF& depth, double scale);

}  // namespace igs
