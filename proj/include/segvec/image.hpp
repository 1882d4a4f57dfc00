#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segvec/geometry.hpp"

namespace segvec {

// Dense RGB image with channels in [0,1], row-major.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, const Rgb& fill = {1.0, 1.0, 1.0});
    // Throws std::invalid_argument if the data size or channel range is wrong.
    RasterImage(int width, int height, std::vector<Rgb> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    const Rgb& at(int x, int y) const { return data_[index(x, y)]; }
    // Writes are clamped to [0,1] to keep the invariant.
    void set(int x, int y, const Rgb& c);

    std::span<const Rgb> pixels() const { return data_; }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> data_;
};

// Real-valued per-pixel map (difference maps, coverage alpha, convolution output).
class ScalarMap {
public:
    ScalarMap() = default;
    ScalarMap(int width, int height, double fill = 0.0);
    ScalarMap(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double at(int x, int y) const { return data_[index(x, y)]; }
    double& at(int x, int y) { return data_[index(x, y)]; }
    std::span<const double> values() const { return data_; }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    friend bool operator==(const ScalarMap&, const ScalarMap&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

// Square boolean stencil centred on its middle cell.
class BinaryKernel {
public:
    BinaryKernel(double radius, int side, std::vector<std::uint8_t> cells);

    double radius() const { return radius_; }
    int side() const { return side_; }
    int half() const { return side_ / 2; }
    // (i, j) are column and row in [0, side).
    bool cell(int i, int j) const { return cells_[static_cast<std::size_t>(j * side_ + i)] != 0; }
    int count() const;

private:
    double radius_;
    int side_;
    std::vector<std::uint8_t> cells_;
};

// 8-bit single channel image, the on-disk form of masks and diagnostic maps.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;
};

// Binary PPM (P6) / PGM (P5) IO. Any maxval in [1,255] is accepted on read;
// samples are normalized by 255 when maxval is 255.
RasterImage load_image(const std::filesystem::path& path);
void save_image(const RasterImage& image, const std::filesystem::path& path);
GrayImage load_gray(const std::filesystem::path& path);
void save_gray(const GrayImage& image, const std::filesystem::path& path);

// Maps [0,1] to a byte, rounding half away from zero.
std::uint8_t to_byte(double v);

// Disc of radius r on a (2*floor(r)+1)-sided grid. Throws for r < 1.
BinaryKernel make_circular_kernel(double r);

// Sum of map samples under the true kernel cells, zero padding outside.
ScalarMap convolve_binary(const ScalarMap& map, const BinaryKernel& kernel);

// Per-pixel sum over channels of |target - render|.
ScalarMap difference_map(const RasterImage& target, const RasterImage& render);

struct Component {
    std::vector<Pixel> pixels;  // breadth-first order from the first pixel
    Pixel centroid;
};

// 4-connected components of the 1-valued pixels, ordered by their first
// pixel in row-major order. Throws if the map holds values outside {0,1}.
std::vector<Component> connected_components(const ScalarMap& binary);

// Scales a map to bytes using v / max_value, clamped.
GrayImage to_gray(const ScalarMap& map, double max_value = 1.0);

}  // namespace segvec
