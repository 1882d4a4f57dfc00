#include "segvec/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace segvec {

struct CanvasAccess {
    static std::vector<Rgb>& color(Canvas& c) { return c.color_; }
    static std::vector<std::uint8_t>& covered(Canvas& c) { return c.covered_; }
};

namespace {

void check_same(int w1, int h1, int w2, int h2, const char* what) {
    if (w1 != w2 || h1 != h2) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Squared channel error of one pixel; uncovered pixels score the maximum 3.
double pixel_error(const Rgb& target, const Rgb& color, bool covered) {
    if (!covered) return 3.0;
    const double dr = target[0] - color[0];
    const double dg = target[1] - color[1];
    const double db = target[2] - color[2];
    return dr * dr + dg * dg + db * db;
}

}  // namespace

Canvas::Canvas(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("canvas dimensions must be positive");
    const auto n = static_cast<std::size_t>(width) * height;
    color_.assign(n, Rgb{0.0, 0.0, 0.0});
    covered_.assign(n, 0);
}

Canvas Canvas::from_image(const RasterImage& image) {
    Canvas c(image.width(), image.height());
    c.color_.assign(image.pixels().begin(), image.pixels().end());
    std::fill(c.covered_.begin(), c.covered_.end(), std::uint8_t{1});
    return c;
}

std::size_t Canvas::covered_count() const {
    return static_cast<std::size_t>(std::count(covered_.begin(), covered_.end(), std::uint8_t{1}));
}

Rgb mean_color(const RasterImage& image, const Mask& mask) {
    check_same(image.width(), image.height(), mask.width(), mask.height(), "mean_color");
    if (mask.area() == 0) throw std::invalid_argument("mean_color: empty mask");
    Rgb sum{0.0, 0.0, 0.0};
    const auto px = image.pixels();
    const auto& bits = mask.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        for (int c = 0; c < 3; ++c) sum[c] += px[i][c];
    }
    const double n = static_cast<double>(mask.area());
    return {sum[0] / n, sum[1] / n, sum[2] / n};
}

Canvas composite(const Canvas& canvas, const Mask& mask, const Rgb& color) {
    check_same(canvas.width(), canvas.height(), mask.width(), mask.height(), "composite");
    Canvas out = canvas;
    const auto& bits = mask.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        out.color_[i] = color;
        out.covered_[i] = 1;
    }
    return out;
}

double canvas_error(const RasterImage& target, const Canvas& canvas) {
    check_same(target.width(), target.height(), canvas.width(), canvas.height(), "canvas_error");
    double sum = 0.0;
    for (int y = 0; y < target.height(); ++y) {
        for (int x = 0; x < target.width(); ++x) {
            sum += pixel_error(target.at(x, y), canvas.color(x, y), canvas.covered(x, y));
        }
    }
    return sum / (3.0 * static_cast<double>(target.size()));
}

FilterResult filter_by_impact(const std::vector<Mask>& masks, const RasterImage& image, double threshold,
                              const Canvas& start) {
    check_same(image.width(), image.height(), start.width(), start.height(), "filter_by_impact");
    for (const Mask& m : masks) check_same(image.width(), image.height(), m.width(), m.height(), "filter_by_impact");

    std::vector<std::size_t> order(masks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Mask& ma = masks[a];
        const Mask& mb = masks[b];
        if (ma.area() != mb.area()) return ma.area() > mb.area();
        if (ma.first_pixel() != mb.first_pixel()) return ma.first_pixel() < mb.first_pixel();
        if (ma.bits() != mb.bits()) return ma.bits() > mb.bits();
        return a < b;
    });

    FilterResult result;
    result.canvas = start;
    result.initial_error = canvas_error(image, start);
    auto& color = CanvasAccess::color(result.canvas);
    auto& covered = CanvasAccess::covered(result.canvas);
    const auto target = image.pixels();
    const double norm = 3.0 * static_cast<double>(image.size());
    double error = result.initial_error;

    std::vector<std::size_t> touched;
    for (std::size_t idx : order) {
        const Mask& mask = masks[idx];
        ImpactDecision d;
        d.mask_index = idx;
        d.area = mask.area();
        if (mask.area() == 0) {
            d.error = error;
            result.decisions.push_back(d);
            continue;
        }
        const Rgb c = mean_color(image, mask);
        touched.clear();
        double reduction = 0.0;
        const auto& bits = mask.bits();
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (!bits[i]) continue;
            touched.push_back(i);
            reduction += pixel_error(target[i], color[i], covered[i] != 0) - pixel_error(target[i], c, true);
        }
        d.impact = reduction / norm;
        d.kept = d.impact >= threshold;
        if (d.kept) {
            for (std::size_t i : touched) {
                color[i] = c;
                covered[i] = 1;
            }
            error -= d.impact;
            result.kept.push_back({mask, c, idx});
        }
        d.error = error;
        result.decisions.push_back(d);
    }
    return result;
}

ScalarMap coverage_alpha(const std::vector<Mask>& masks, int width, int height) {
    ScalarMap alpha(width, height, 0.0);
    for (const Mask& m : masks) {
        check_same(width, height, m.width(), m.height(), "coverage_alpha");
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                if (m.at(x, y)) alpha.at(x, y) = 1.0;
            }
        }
    }
    return alpha;
}

std::vector<PromptPoint> find_uncovered_points(const ScalarMap& alpha, double r) {
    for (double v : alpha.values()) {
        if (v != 0.0 && v != 1.0) throw std::invalid_argument("find_uncovered_points: alpha is not binary");
    }
    const ScalarMap conv = convolve_binary(alpha, make_circular_kernel(r));
    std::vector<PromptPoint> out;
    for (int y = 0; y < conv.height(); ++y) {
        for (int x = 0; x < conv.width(); ++x) {
            if (conv.at(x, y) == 0.0) out.push_back({x, y});
        }
    }
    return out;
}

std::vector<PromptPoint> mean_shift(const std::vector<PromptPoint>& points, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("mean_shift: bandwidth must be positive");
    if (points.empty()) return {};

    // Uniform grid of cell size `bandwidth` so each query scans 3x3 cells.
    std::map<std::pair<long, long>, std::vector<Point2>> grid;
    auto cell_of = [&](const Point2& p) {
        return std::pair<long, long>{static_cast<long>(std::floor(p.x / bandwidth)),
                                     static_cast<long>(std::floor(p.y / bandwidth))};
    };
    for (const PromptPoint& p : points) {
        const Point2 q{static_cast<double>(p.x), static_cast<double>(p.y)};
        grid[cell_of(q)].push_back(q);
    }
    const double bw2 = bandwidth * bandwidth;
    auto neighbourhood = [&](const Point2& at, Point2& mean) -> std::size_t {
        const auto [cx, cy] = cell_of(at);
        double sx = 0.0;
        double sy = 0.0;
        std::size_t n = 0;
        for (long gy = cy - 1; gy <= cy + 1; ++gy) {
            for (long gx = cx - 1; gx <= cx + 1; ++gx) {
                const auto it = grid.find({gx, gy});
                if (it == grid.end()) continue;
                for (const Point2& q : it->second) {
                    const double dx = q.x - at.x;
                    const double dy = q.y - at.y;
                    if (dx * dx + dy * dy <= bw2) {
                        sx += q.x;
                        sy += q.y;
                        ++n;
                    }
                }
            }
        }
        if (n > 0) mean = {sx / static_cast<double>(n), sy / static_cast<double>(n)};
        return n;
    };

    struct Mode {
        Point2 at;
        std::size_t support;
    };
    std::vector<Mode> modes;
    for (const PromptPoint& p : points) {
        Point2 cur{static_cast<double>(p.x), static_cast<double>(p.y)};
        for (int iter = 0; iter < 100; ++iter) {
            Point2 next = cur;
            neighbourhood(cur, next);
            const double shift = distance(next, cur);
            cur = next;
            if (shift < 0.01) break;
        }
        Point2 unused;
        const std::size_t support = neighbourhood(cur, unused);
        modes.push_back({cur, support});
    }

    std::vector<std::size_t> order(modes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (modes[a].support != modes[b].support) return modes[a].support > modes[b].support;
        const PromptPoint pa{static_cast<int>(std::lround(modes[a].at.x)), static_cast<int>(std::lround(modes[a].at.y))};
        const PromptPoint pb{static_cast<int>(std::lround(modes[b].at.x)), static_cast<int>(std::lround(modes[b].at.y))};
        return pa < pb;
    });

    std::vector<PromptPoint> out;
    const double merge = bandwidth / 2.0;
    for (std::size_t i : order) {
        const PromptPoint p{static_cast<int>(std::lround(modes[i].at.x)), static_cast<int>(std::lround(modes[i].at.y))};
        const bool close = std::any_of(out.begin(), out.end(), [&](const PromptPoint& q) {
            return std::hypot(static_cast<double>(p.x - q.x), static_cast<double>(p.y - q.y)) < merge;
        });
        if (!close) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double region_radius(int width, int height, double fraction) {
    return std::max(3.0, std::round(fraction * static_cast<double>(std::min(width, height))));
}

}  // namespace segvec
