#pragma once

#include <vector>

#include "segvec/image.hpp"
#include "segvec/vectordoc.hpp"

namespace segvec {

struct RenderConfig {
    int flatten_steps = 16;  // polyline vertices per cubic
    // Half-width of the coverage ramp in pixels. 0.5 makes the ramp match box
    // filtered area coverage for axis-aligned edges.
    double smoothing = 0.5;
};

void validate(const RenderConfig& cfg);

// Soft rasterization onto a white background. Each path is flattened to a
// closed polygon; pixel centres get coverage clamp(0.5 - sd / (2 eps), 0, 1)
// from the signed distance (negative inside, nonzero winding) and paths are
// composited back to front.
RasterImage render(const VectorDocument& doc, int width, int height, const RenderConfig& cfg = {});

double mse_loss(const RasterImage& render, const RasterImage& target);

// Mean over all segments of sigma * relu(-cos) + (1 - sigma) * relu(cos), with
// the angle taken between (p1 - p0) and (p3 - p2) and sigma = [cross > 0].
double xing_loss(const VectorDocument& doc);

struct PathGradient {
    std::vector<Point2> points;  // mirrors BezierPath::points()
    Rgb fill{0.0, 0.0, 0.0};
};

struct Gradients {
    std::vector<PathGradient> paths;
};

struct LossValue {
    double total = 0.0;
    double mse = 0.0;
    double xing = 0.0;
    Gradients grad;
};

// mse + lambda_xing * xing with exact gradients of both terms with respect to
// every control point coordinate and fill channel.
LossValue total_loss(const VectorDocument& doc, const RasterImage& target, const RenderConfig& cfg,
                     double lambda_xing);

}  // namespace segvec
