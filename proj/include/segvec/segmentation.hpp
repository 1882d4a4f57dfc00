#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "segvec/image.hpp"

namespace segvec {

// Binary pixel set over an image grid. Area is derived from the bits.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, std::vector<std::uint8_t> bits, double confidence = 1.0);
    static Mask empty(int width, int height) { return Mask(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0)); }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t area() const { return area_; }
    double confidence() const { return confidence_; }

    bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    // Index of the first set pixel in row-major order, or size() if empty.
    std::size_t first_pixel() const;

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
    std::size_t area_ = 0;
    double confidence_ = 1.0;
};

inline constexpr double kDefaultTolerance = 0.12;
inline constexpr double kDedupIou = 0.9;

// ceil(0.0005 * w * h), at least 1.
std::size_t default_min_area(int width, int height);

double iou(const Mask& a, const Mask& b);

// Reads a JSON manifest {width, height, entries: [{file, confidence}]}. Mask
// files are binary PGM resolved relative to the manifest; samples > 127 are set.
std::vector<Mask> ingest_masks(const std::filesystem::path& manifest_path, const RasterImage& image);

// Breadth-first region growing from the seed. A 4-neighbour joins when its
// RGB distance to the running region mean is within tolerance.
Mask prompt_segment(const RasterImage& image, PromptPoint seed, double tolerance = kDefaultTolerance);

// Seeds at the centres of a grid_side x grid_side lattice, then greedy IoU
// deduplication keeping the larger mask. Output is sorted by area, descending.
std::vector<Mask> auto_segment(const RasterImage& image, int grid_side, double tolerance = kDefaultTolerance);

// Removes set components smaller than min_area and fills enclosed holes
// smaller than min_area (holes touching the border are kept).
Mask clean_mask(const Mask& mask, std::size_t min_area);

}  // namespace segvec
