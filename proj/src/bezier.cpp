#include "segvec/bezier.hpp"

#include <cmath>

namespace segvec {

std::array<double, 4> bernstein(double t) {
    const double u = 1.0 - t;
    return {u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t};
}

Point2 CubicSegment::eval(double t) const {
    const auto b = bernstein(t);
    return {b[0] * p0.x + b[1] * p1.x + b[2] * p2.x + b[3] * p3.x,
            b[0] * p0.y + b[1] * p1.y + b[2] * p2.y + b[3] * p3.y};
}

BezierPath::BezierPath(std::vector<Point2> points, const Rgb& fill) : points_(std::move(points)), fill_(fill) {
    if (points_.empty() || points_.size() % 3 != 0) {
        throw std::invalid_argument("BezierPath needs 3 control points per segment");
    }
    for (const Point2& p : points_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("BezierPath: non-finite point");
    }
}

BezierPath BezierPath::from_segments(std::span<const CubicSegment> segments, const Rgb& fill) {
    if (segments.empty()) throw std::invalid_argument("BezierPath needs at least one segment");
    std::vector<Point2> points;
    points.reserve(segments.size() * 3);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const CubicSegment& seg = segments[s];
        const CubicSegment& next = segments[(s + 1) % segments.size()];
        if (!(seg.p3 == next.p0)) throw std::invalid_argument("BezierPath: segments do not form a closed chain");
        points.push_back(seg.p0);
        points.push_back(seg.p1);
        points.push_back(seg.p2);
    }
    return BezierPath(std::move(points), fill);
}

CubicSegment BezierPath::segment(std::size_t s) const {
    const std::size_t n = points_.size();
    return {points_[3 * s], points_[3 * s + 1], points_[3 * s + 2], points_[(3 * s + 3) % n]};
}

std::vector<CubicSegment> BezierPath::segments() const {
    std::vector<CubicSegment> out;
    out.reserve(segment_count());
    for (std::size_t s = 0; s < segment_count(); ++s) out.push_back(segment(s));
    return out;
}

}  // namespace segvec
