#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "segvec/bezier.hpp"
#include "segvec/image.hpp"
#include "segvec/segmentation.hpp"

namespace segvec {

inline constexpr std::size_t kMinTraceArea = 16;
inline constexpr int kDefaultSegments = 4;

// Closed outer boundary of one 4-connected mask component, as pixel
// coordinates. Consecutive points are 8-adjacent and the traversal has
// positive shoelace area (counter-clockwise with y pointing up, which reads
// clockwise on a y-down screen). A pixel on a one-pixel-wide spur appears
// once per pass along the spur.
struct Contour {
    std::vector<Pixel> points;

    std::size_t size() const { return points.size(); }
    double arc_length() const;
};

// Moore-neighbour tracing of every component with at least min_area pixels,
// ordered by first pixel. Throws std::invalid_argument if the mask area or
// every component is below min_area.
std::vector<Contour> extract_contour(const Mask& mask, std::size_t min_area = kMinTraceArea);

// Boundary in continuous coordinates: pixel centres pushed half a pixel
// outwards along the quantized outward normal, so straight runs land on the
// pixel edges of the mask.
std::vector<Point2> outline_points(const Contour& contour);

// k-cosine strength 1 - cos(turn) per point, in [0, 2].
std::vector<double> corner_strength(const Contour& contour, int k);

// max(3, ceil(length / 40))
int corner_window(const Contour& contour);

// Greedy global-maximum corner picking with arc-length suppression. Falls back
// to evenly spaced indices when candidates run out. Sorted contour indices.
std::vector<std::size_t> select_corners(std::span<const double> strengths, const Contour& contour, int n,
                                        double suppress);

// Least-squares cubic through the ordered points with the first and last
// point as fixed endpoints (chord-length parameters). Fewer than two interior
// points put the inner controls at thirds of the chord.
CubicSegment fit_cubic(std::span<const Point2> points);

// One cubic per corner-to-corner arc of the outline; fill = mean_color(image, mask).
BezierPath fit_path(const Contour& contour, std::span<const std::size_t> corners, const RasterImage& image,
                    const Mask& mask);

// Full tracing of one mask: one path per traceable component.
std::vector<BezierPath> trace_mask(const Mask& mask, const RasterImage& image, int segments = kDefaultSegments,
                                   std::size_t min_area = kMinTraceArea);

}  // namespace segvec
