#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace igs {

// Row-major 2D grid. (x, y) indexing with x the column, y the row.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, const T& fill = T{})
        : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int x, int y) {
        assert(in_bounds(x, y));
        return data_[static_cast<size_t>(y) * width_ + x];
    }
    const T& operator()(int x, int y) const {
        assert(in_bounds(x, y));
        return data_[static_cast<size_t>(y) * width_ + x];
    }
    T& operator[](size_t i) { return data_[i]; }
    const T& operator[](size_t i) const { return data_[i]; }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

    bool operator==(const Grid&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using GridF = Grid<double>;
using GridV2 = Grid<Eigen::Vector2d>;
using GridU8 = Grid<uint8_t>;

// Interleaved RGB image with channel values in [0, 1].
class ImageRGB {
public:
    ImageRGB() = default;
    ImageRGB(int width, int height) : width_(width), height_(height),
        px_(static_cast<size_t>(width) * height * 3, 0.0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return px_.empty(); }

    double& at(int x, int y, int c) { return px_[(static_cast<size_t>(y) * width_ + x) * 3 + c]; }
    double at(int x, int y, int c) const { return px_[(static_cast<size_t>(y) * width_ + x) * 3 + c]; }

    Eigen::Vector3d rgb(int x, int y) const {
        const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
        return {px_[i], px_[i + 1], px_[i + 2]};
    }
    void set_rgb(int x, int y, const Eigen::Vector3d& v) {
        const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
        px_[i] = v.x();
        px_[i + 1] = v.y();
        px_[i + 2] = v.z();
    }

    std::vector<double>& raw() { return px_; }
    const std::vector<double>& raw() const { return px_; }

    bool operator==(const ImageRGB&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> px_;
};

// Bilinear sample with clamped borders. Coordinates are pixel-centered:
// (0, 0) is the center of the top-left pixel.
double bilinear_sample(const GridF& g, double x, double y);

// Bilinear resize using the align-centers convention:
//   src_x = (dst_x + 0.5) * (src_w / dst_w) - 0.5
GridF resize_bilinear(const GridF& src, int dst_w, int dst_h);
ImageRGB resize_bilinear(const ImageRGB& src, int dst_w, int dst_h);

}  // namespace igs
