#include "segvec/tracing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "segvec/selection.hpp"

namespace segvec {

namespace {

// Moore neighbourhood, clockwise on a y-down grid starting east.
constexpr int kMx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kMy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int direction_of(int dx, int dy) {
    for (int d = 0; d < 8; ++d) {
        if (kMx[d] == dx && kMy[d] == dy) return d;
    }
    throw std::logic_error("direction_of: not a unit step");
}

Contour trace_component(const std::vector<int>& label, int id, int w, int h, Pixel start) {
    auto inside = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && label[static_cast<std::size_t>(y) * w + x] == id;
    };
    Contour c;
    c.points.push_back(start);

    // Enter the start pixel from the west, which is never part of the component.
    Pixel cur = start;
    int back = 4;
    Pixel second{-1, -1};
    bool have_second = false;
    const std::size_t limit = 4 * static_cast<std::size_t>(w) * h + 8;
    while (c.points.size() < limit) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int d = (back + k) % 8;
            if (inside(cur.x + kMx[d], cur.y + kMy[d])) {
                found = d;
                break;
            }
        }
        if (found < 0) break;  // isolated pixel
        const Pixel next{cur.x + kMx[found], cur.y + kMy[found]};
        const int prev_dir = (found + 7) % 8;
        const Pixel b{cur.x + kMx[prev_dir], cur.y + kMy[prev_dir]};
        if (cur == start) {
            if (have_second && next == second) break;
            if (!have_second) {
                second = next;
                have_second = true;
            }
        }
        back = direction_of(b.x - next.x, b.y - next.y);
        cur = next;
        if (cur == start && c.points.size() > 1) {
            // Loop closes here unless the start is a cut vertex with an unvisited branch.
            int probe = -1;
            for (int k = 1; k <= 8; ++k) {
                const int d = (back + k) % 8;
                if (inside(cur.x + kMx[d], cur.y + kMy[d])) {
                    probe = d;
                    break;
                }
            }
            if (probe >= 0 && Pixel{cur.x + kMx[probe], cur.y + kMy[probe]} == second) break;
        }
        c.points.push_back(cur);
    }
    return c;
}

}  // namespace

double Contour::arc_length() const {
    double len = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Pixel& a = points[i];
        const Pixel& b = points[(i + 1) % points.size()];
        len += std::hypot(static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y));
    }
    return len;
}

std::vector<Contour> extract_contour(const Mask& mask, std::size_t min_area) {
    if (mask.area() < min_area) throw std::invalid_argument("extract_contour: mask area below the traceable minimum");
    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> label(mask.bits().size(), -1);
    std::vector<Contour> out;
    int next_id = 0;
    std::deque<std::size_t> queue;
    constexpr int kDx[4] = {0, -1, 1, 0};
    constexpr int kDy[4] = {-1, 0, 0, 1};
    for (std::size_t s = 0; s < label.size(); ++s) {
        if (!mask.bits()[s] || label[s] >= 0) continue;
        const int id = next_id++;
        std::size_t area = 0;
        label[s] = id;
        queue.push_back(s);
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            ++area;
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            for (int k = 0; k < 4; ++k) {
                const int nx = x + kDx[k];
                const int ny = y + kDy[k];
                if (!mask.contains(nx, ny)) continue;
                const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
                if (!mask.bits()[n] || label[n] >= 0) continue;
                label[n] = id;
                queue.push_back(n);
            }
        }
        if (area < min_area) continue;
        const Pixel start{static_cast<int>(s % w), static_cast<int>(s / w)};
        out.push_back(trace_component(label, id, w, h, start));
    }
    if (out.empty()) throw std::invalid_argument("extract_contour: no component reaches the traceable minimum");
    return out;
}

std::vector<Point2> outline_points(const Contour& contour) {
    const std::size_t m = contour.size();
    std::vector<Point2> out;
    out.reserve(m);
    // sin(22.5 deg): normal components below this fraction are treated as zero.
    constexpr double kSnap = 0.38268343236508984;
    for (std::size_t i = 0; i < m; ++i) {
        const Pixel& prev = contour.points[(i + m - 1) % m];
        const Pixel& next = contour.points[(i + 1) % m];
        const Pixel& p = contour.points[i];
        const double tx = next.x - prev.x;
        const double ty = next.y - prev.y;
        const double nx = ty;
        const double ny = -tx;
        const double len = std::hypot(nx, ny);
        Point2 q{p.x + 0.5, p.y + 0.5};
        if (len > 0.0) {
            if (nx > kSnap * len) q.x += 0.5;
            if (nx < -kSnap * len) q.x -= 0.5;
            if (ny > kSnap * len) q.y += 0.5;
            if (ny < -kSnap * len) q.y -= 0.5;
        }
        out.push_back(q);
    }
    return out;
}

int corner_window(const Contour& contour) {
    return std::max(3, static_cast<int>(std::ceil(static_cast<double>(contour.size()) / 40.0)));
}

std::vector<double> corner_strength(const Contour& contour, int k) {
    const std::size_t m = contour.size();
    if (k < 1 || m <= 2 * static_cast<std::size_t>(k)) {
        throw std::invalid_argument("corner_strength: contour too short for window k");
    }
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const Pixel& a = contour.points[(i + m - k) % m];
        const Pixel& p = contour.points[i];
        const Pixel& b = contour.points[(i + k) % m];
        const Point2 in{static_cast<double>(p.x - a.x), static_cast<double>(p.y - a.y)};
        const Point2 out_v{static_cast<double>(b.x - p.x), static_cast<double>(b.y - p.y)};
        const double ln = norm(in) * norm(out_v);
        if (ln == 0.0) continue;
        out[i] = 1.0 - std::clamp(dot(in, out_v) / ln, -1.0, 1.0);
    }
    return out;
}

std::vector<std::size_t> select_corners(std::span<const double> strengths, const Contour& contour, int n,
                                        double suppress) {
    const std::size_t m = contour.size();
    if (n < 2) throw std::invalid_argument("select_corners: need at least two corners");
    if (m < static_cast<std::size_t>(n)) throw std::invalid_argument("select_corners: contour shorter than n");
    if (strengths.size() != m) throw std::invalid_argument("select_corners: strength count mismatch");

    std::vector<double> cum(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
        const Pixel& a = contour.points[i - 1];
        const Pixel& b = contour.points[i];
        cum[i] = cum[i - 1] + std::hypot(static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y));
    }
    const double total = contour.arc_length();
    auto arc = [&](std::size_t i, std::size_t j) {
        const double d = std::abs(cum[i] - cum[j]);
        return std::min(d, total - d);
    };

    std::vector<bool> alive(m, true);
    std::vector<std::size_t> chosen;
    for (int r = 0; r < n; ++r) {
        std::size_t best = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (alive[i] && (best == m || strengths[i] > strengths[best])) best = i;
        }
        if (best == m) break;
        chosen.push_back(best);
        for (std::size_t j = 0; j < m; ++j) {
            if (alive[j] && arc(best, j) < suppress) alive[j] = false;
        }
        alive[best] = false;
    }

    if (chosen.size() < static_cast<std::size_t>(n)) {
        const std::size_t base = chosen.empty() ? 0 : chosen.front();
        for (int q = 0; q < n && chosen.size() < static_cast<std::size_t>(n); ++q) {
            const auto step = static_cast<std::size_t>(std::llround(static_cast<double>(q) * m / n));
            const std::size_t idx = (base + step) % m;
            if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
        }
        for (std::size_t idx = 0; chosen.size() < static_cast<std::size_t>(n); ++idx) {
            if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

CubicSegment fit_cubic(std::span<const Point2> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_cubic: need at least two points");
    const Point2 a = points.front();
    const Point2 b = points.back();
    const CubicSegment thirds{a, a + (1.0 / 3.0) * (b - a), a + (2.0 / 3.0) * (b - a), b};
    if (points.size() < 4) return thirds;

    std::vector<double> t(points.size(), 0.0);
    for (std::size_t i = 1; i < points.size(); ++i) t[i] = t[i - 1] + distance(points[i - 1], points[i]);
    const double total = t.back();
    if (total <= 0.0) return thirds;
    for (double& v : t) v /= total;

    double a11 = 0.0, a12 = 0.0, a22 = 0.0;
    Point2 r1, r2;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto w = bernstein(t[i]);
        const Point2 res = points[i] - w[0] * a - w[3] * b;
        a11 += w[1] * w[1];
        a12 += w[1] * w[2];
        a22 += w[2] * w[2];
        r1 += w[1] * res;
        r2 += w[2] * res;
    }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) < 1e-12) return thirds;
    const Point2 c1 = (1.0 / det) * (a22 * r1 - a12 * r2);
    const Point2 c2 = (1.0 / det) * (a11 * r2 - a12 * r1);
    return {a, c1, c2, b};
}

BezierPath fit_path(const Contour& contour, std::span<const std::size_t> corners, const RasterImage& image,
                    const Mask& mask) {
    const std::size_t m = contour.size();
    if (corners.size() < 2) throw std::invalid_argument("fit_path: need at least two corners");
    for (std::size_t i = 0; i < corners.size(); ++i) {
        if (corners[i] >= m || (i > 0 && corners[i] <= corners[i - 1])) {
            throw std::invalid_argument("fit_path: corners must be sorted, distinct contour indices");
        }
    }
    const std::vector<Point2> outline = outline_points(contour);
    std::vector<Point2> control;
    control.reserve(3 * corners.size());
    std::vector<Point2> arc;
    for (std::size_t s = 0; s < corners.size(); ++s) {
        const std::size_t from = corners[s];
        std::size_t to = corners[(s + 1) % corners.size()];
        if (to <= from) to += m;
        arc.clear();
        for (std::size_t i = from; i <= to; ++i) arc.push_back(outline[i % m]);
        const CubicSegment seg = fit_cubic(arc);
        control.push_back(seg.p0);
        control.push_back(seg.p1);
        control.push_back(seg.p2);
    }
    return BezierPath(std::move(control), mean_color(image, mask));
}

std::vector<BezierPath> trace_mask(const Mask& mask, const RasterImage& image, int segments, std::size_t min_area) {
    if (segments < 2) throw std::invalid_argument("trace_mask: need at least two segments per path");
    std::vector<BezierPath> paths;
    for (const Contour& contour : extract_contour(mask, min_area)) {
        if (contour.size() < static_cast<std::size_t>(segments) || contour.size() < 3) continue;
        int k = corner_window(contour);
        if (contour.size() <= 2 * static_cast<std::size_t>(k)) k = static_cast<int>((contour.size() - 1) / 2);
        const std::vector<double> strength = corner_strength(contour, k);
        const double suppress = contour.arc_length() / (2.0 * segments);
        const auto corners = select_corners(strength, contour, segments, suppress);
        paths.push_back(fit_path(contour, corners, image, mask));
    }
    return paths;
}

}  // namespace segvec
