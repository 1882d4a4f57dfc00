#pragma once

#include <cstdint>
#include <vector>

#include "segvec/image.hpp"
#include "segvec/segmentation.hpp"

namespace segvec {

// Reconstruction canvas for mask filtering. Uncovered pixels hold the
// sentinel colour (0,0,0) and count as maximum error.
class Canvas {
public:
    Canvas() = default;
    // Blank: nothing covered.
    Canvas(int width, int height);
    // Every pixel covered with the image's colour.
    static Canvas from_image(const RasterImage& image);

    int width() const { return width_; }
    int height() const { return height_; }
    const Rgb& color(int x, int y) const { return color_[index(x, y)]; }
    bool covered(int x, int y) const { return covered_[index(x, y)] != 0; }
    std::size_t covered_count() const;

    friend bool operator==(const Canvas&, const Canvas&) = default;

private:
    friend Canvas composite(const Canvas&, const Mask&, const Rgb&);
    friend struct CanvasAccess;

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> color_;
    std::vector<std::uint8_t> covered_;
};

struct ImpactDecision {
    std::size_t mask_index = 0;  // position in the caller's mask list
    std::size_t area = 0;
    double impact = 0.0;  // error reduction e_{i-1} - e_i of the trial composite
    double error = 0.0;   // canvas error after the decision
    bool kept = false;
};

struct ColoredMask {
    Mask mask;
    Rgb color{};
    std::size_t source_index = 0;
};

struct FilterResult {
    std::vector<ColoredMask> kept;  // in processing order (area descending)
    Canvas canvas;
    std::vector<ImpactDecision> decisions;  // in processing order
    double initial_error = 0.0;
};

inline constexpr double kDefaultImpactThreshold = 0.001;

Rgb mean_color(const RasterImage& image, const Mask& mask);

Canvas composite(const Canvas& canvas, const Mask& mask, const Rgb& color);

// Mean squared channel error over all pixels, uncovered pixels scored 1 per channel.
double canvas_error(const RasterImage& target, const Canvas& canvas);

// Greedy Filter-by-Impact. Masks are visited by area (descending), ties broken
// by first set pixel then by bit pattern, so the result ignores input order.
FilterResult filter_by_impact(const std::vector<Mask>& masks, const RasterImage& image, double threshold,
                              const Canvas& start);

// 1 where any mask is set.
ScalarMap coverage_alpha(const std::vector<Mask>& masks, int width, int height);

// Pixels whose whole r-disc (zero padded) is uncovered.
std::vector<PromptPoint> find_uncovered_points(const ScalarMap& alpha, double r);

// Flat-kernel mean shift. Modes are rounded to pixels, merged when closer than
// bandwidth/2 and returned in row-major order.
std::vector<PromptPoint> mean_shift(const std::vector<PromptPoint>& points, double bandwidth);

// max(3, round(fraction * min(w, h)))
double region_radius(int width, int height, double fraction = 0.03);

}  // namespace segvec
