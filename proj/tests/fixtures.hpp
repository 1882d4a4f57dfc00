#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "segvec/pipeline.hpp"

namespace fixtures {

using namespace segvec;

struct Rect {
    int x0, y0, x1, y1;  // half-open
    Rgb color;
};

inline RasterImage paint(int w, int h, const std::vector<Rect>& rects, const Rgb& bg = {1.0, 1.0, 1.0}) {
    RasterImage img(w, h, bg);
    for (const Rect& r : rects) {
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) img.set(x, y, r.color);
    }
    return img;
}

inline Mask rect_mask(int w, int h, int x0, int y0, int x1, int y1) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h, 0);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) bits[static_cast<std::size_t>(y) * w + x] = 1;
    return Mask(w, h, std::move(bits));
}

inline Mask disc_mask(int w, int h, double cx, double cy, double r) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            bits[static_cast<std::size_t>(y) * w + x] = std::hypot(x - cx, y - cy) <= r ? 1 : 0;
    return Mask(w, h, std::move(bits));
}

// Closed four-segment path tracing the rectangle [x0,x1] x [y0,y1] clockwise on screen.
inline BezierPath rect_path(double x0, double y0, double x1, double y1, const Rgb& fill) {
    auto lerp = [](Point2 a, Point2 b, double t) { return a + (b - a) * t; };
    const Point2 c[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    std::vector<Point2> pts;
    for (int i = 0; i < 4; ++i) {
        const Point2 a = c[i];
        const Point2 b = c[(i + 1) % 4];
        pts.push_back(a);
        pts.push_back(lerp(a, b, 1.0 / 3.0));
        pts.push_back(lerp(a, b, 2.0 / 3.0));
    }
    return BezierPath(std::move(pts), fill);
}

// Wobbly closed blob around (cx, cy).
inline BezierPath random_blob(std::mt19937& rng, double cx, double cy, double radius, int segments = 4) {
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double kPi = 3.14159265358979323846;
    std::vector<Point2> pts;
    const int n = 3 * segments;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * (i + jitter(rng)) / n;
        const double rr = radius * (1.0 + jitter(rng));
        pts.push_back({cx + rr * std::cos(a), cy + rr * std::sin(a)});
    }
    return BezierPath(std::move(pts), {unit(rng), unit(rng), unit(rng)});
}

inline RasterImage random_image(std::mt19937& rng, int w, int h) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Rgb> data(static_cast<std::size_t>(w) * h);
    for (Rgb& c : data) c = {unit(rng), unit(rng), unit(rng)};
    return RasterImage(w, h, std::move(data));
}

// Three flat rectangles on white; the end-to-end fixture.
inline RasterImage three_rectangles() {
    return paint(64, 64, {{6, 8, 30, 28, {0.85, 0.15, 0.15}},
                          {34, 6, 58, 40, {0.15, 0.35, 0.8}},
                          {12, 38, 44, 58, {0.2, 0.7, 0.25}}});
}

}  // namespace fixtures
