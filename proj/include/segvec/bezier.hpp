#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "segvec/geometry.hpp"

namespace segvec {

struct CubicSegment {
    Point2 p0, p1, p2, p3;

    Point2 eval(double t) const;

    friend bool operator==(const CubicSegment&, const CubicSegment&) = default;
};

// Cubic Bernstein weights at t.
std::array<double, 4> bernstein(double t);

// Closed chain of cubic segments with an opaque fill.
//
// The chain is stored as its distinct control points: segment s uses points
// 3s, 3s+1, 3s+2 and the first point of segment s+1 (wrapping), so the
// closure invariant holds by construction.
class BezierPath {
public:
    BezierPath() = default;
    // `points` must hold 3 * segment_count entries (at least one segment).
    BezierPath(std::vector<Point2> points, const Rgb& fill);
    // Each segment's p3 must equal the next segment's p0, including the wrap.
    static BezierPath from_segments(std::span<const CubicSegment> segments, const Rgb& fill);

    std::size_t segment_count() const { return points_.size() / 3; }
    CubicSegment segment(std::size_t s) const;
    std::vector<CubicSegment> segments() const;

    std::span<const Point2> points() const { return points_; }
    std::span<Point2> points() { return points_; }
    const Rgb& fill() const { return fill_; }
    void set_fill(const Rgb& fill) { fill_ = fill; }

    friend bool operator==(const BezierPath&, const BezierPath&) = default;

private:
    std::vector<Point2> points_;
    Rgb fill_{0.0, 0.0, 0.0};
};

}  // namespace segvec
