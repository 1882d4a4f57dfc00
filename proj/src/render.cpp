#include "segvec/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace segvec {

namespace {

struct FlatPath {
    std::vector<Point2> verts;  // closed polygon, vertex s * steps + k is segment s at t = k / steps
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

FlatPath flatten(const BezierPath& path, int steps) {
    FlatPath fp;
    fp.verts.reserve(path.segment_count() * static_cast<std::size_t>(steps));
    for (std::size_t s = 0; s < path.segment_count(); ++s) {
        const CubicSegment seg = path.segment(s);
        for (int k = 0; k < steps; ++k) fp.verts.push_back(seg.eval(static_cast<double>(k) / steps));
    }
    fp.min_x = fp.max_x = fp.verts[0].x;
    fp.min_y = fp.max_y = fp.verts[0].y;
    for (const Point2& v : fp.verts) {
        fp.min_x = std::min(fp.min_x, v.x);
        fp.max_x = std::max(fp.max_x, v.x);
        fp.min_y = std::min(fp.min_y, v.y);
        fp.max_y = std::max(fp.max_y, v.y);
    }
    return fp;
}

bool outside_band(const FlatPath& fp, const Point2& q, double eps) {
    return q.x < fp.min_x - eps || q.x > fp.max_x + eps || q.y < fp.min_y - eps || q.y > fp.max_y + eps;
}

struct Hit {
    double sd = 0.0;   // signed distance, negative inside
    double sign = 1.0;
    double dist = 0.0;
    std::size_t edge = 0;  // edge from verts[edge] to verts[edge + 1]
    double t = 0.0;
    Point2 closest;
};

Hit signed_distance(const FlatPath& fp, const Point2& q) {
    const std::size_t n = fp.verts.size();
    Hit h;
    double best = std::numeric_limits<double>::infinity();
    int winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = fp.verts[i];
        const Point2& b = fp.verts[(i + 1) % n];
        const Point2 ab = b - a;
        const double len2 = dot(ab, ab);
        double t = len2 > 0.0 ? dot(q - a, ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const Point2 c = a + t * ab;
        const double dx = q.x - c.x;
        const double dy = q.y - c.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) {
            best = d2;
            h.edge = i;
            h.t = t;
            h.closest = c;
        }
        // Winding number by signed upward / downward crossings.
        if (a.y <= q.y) {
            if (b.y > q.y && cross(ab, q - a) > 0.0) ++winding;
        } else if (b.y <= q.y && cross(ab, q - a) < 0.0) {
            --winding;
        }
    }
    h.dist = std::sqrt(best);
    h.sign = winding != 0 ? -1.0 : 1.0;
    h.sd = h.sign * h.dist;
    return h;
}

double coverage_raw(double sd, double eps) { return 0.5 - sd / (2.0 * eps); }

}  // namespace

void validate(const RenderConfig& cfg) {
    if (cfg.flatten_steps < 2) throw std::invalid_argument("flatten_steps must be >= 2");
    if (!(cfg.smoothing > 0.0)) throw std::invalid_argument("smoothing must be positive");
}

RasterImage render(const VectorDocument& doc, int width, int height, const RenderConfig& cfg) {
    validate(cfg);
    std::vector<FlatPath> flat;
    flat.reserve(doc.paths.size());
    for (const BezierPath& p : doc.paths) flat.push_back(flatten(p, cfg.flatten_steps));

    std::vector<Rgb> data(static_cast<std::size_t>(width) * height);
    const double eps = cfg.smoothing;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Point2 q{x + 0.5, y + 0.5};
            Rgb c{1.0, 1.0, 1.0};
            for (std::size_t k = 0; k < flat.size(); ++k) {
                if (outside_band(flat[k], q, eps)) continue;
                const double alpha = std::clamp(coverage_raw(signed_distance(flat[k], q).sd, eps), 0.0, 1.0);
                if (alpha == 0.0) continue;
                const Rgb& f = doc.paths[k].fill();
                for (int ch = 0; ch < 3; ++ch) c[ch] = alpha * f[ch] + (1.0 - alpha) * c[ch];
            }
            for (double& v : c) v = std::clamp(v, 0.0, 1.0);
            data[static_cast<std::size_t>(y) * width + x] = c;
        }
    }
    return RasterImage(width, height, std::move(data));
}

double mse_loss(const RasterImage& render, const RasterImage& target) {
    if (render.width() != target.width() || render.height() != target.height()) {
        throw std::invalid_argument("mse_loss: dimension mismatch");
    }
    double sum = 0.0;
    const auto a = render.pixels();
    const auto b = target.pixels();
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const double d = a[i][c] - b[i][c];
            sum += d * d;
        }
    }
    return sum / (3.0 * static_cast<double>(a.size()));
}

namespace {

// Xing term of one segment; adds its gradient (scaled by `scale`) to the four
// control point slots when grad is non-null.
double xing_segment(const CubicSegment& s, double scale, Point2* g0, Point2* g1, Point2* g2, Point2* g3) {
    const Point2 e1 = s.p1 - s.p0;
    const Point2 e2 = s.p3 - s.p2;
    const double n1 = norm(e1);
    const double n2 = norm(e2);
    if (n1 == 0.0 || n2 == 0.0) return 0.0;
    const double cosv = dot(e1, e2) / (n1 * n2);
    const bool sigma = cross(e1, e2) > 0.0;
    double value = 0.0;
    double dvalue_dcos = 0.0;
    if (sigma && cosv < 0.0) {
        value = -cosv;
        dvalue_dcos = -1.0;
    } else if (!sigma && cosv > 0.0) {
        value = cosv;
        dvalue_dcos = 1.0;
    }
    if (g0 != nullptr && dvalue_dcos != 0.0) {
        const double k = scale * dvalue_dcos;
        const Point2 dcos_de1 = (1.0 / (n1 * n2)) * e2 - (cosv / (n1 * n1)) * e1;
        const Point2 dcos_de2 = (1.0 / (n1 * n2)) * e1 - (cosv / (n2 * n2)) * e2;
        *g1 += k * dcos_de1;
        *g0 -= k * dcos_de1;
        *g3 += k * dcos_de2;
        *g2 -= k * dcos_de2;
    }
    return value;
}

std::size_t segment_total(const VectorDocument& doc) {
    std::size_t n = 0;
    for (const BezierPath& p : doc.paths) n += p.segment_count();
    return n;
}

}  // namespace

double xing_loss(const VectorDocument& doc) {
    const std::size_t n = segment_total(doc);
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (const BezierPath& p : doc.paths) {
        for (std::size_t s = 0; s < p.segment_count(); ++s) {
            sum += xing_segment(p.segment(s), 0.0, nullptr, nullptr, nullptr, nullptr);
        }
    }
    return sum / static_cast<double>(n);
}

LossValue total_loss(const VectorDocument& doc, const RasterImage& target, const RenderConfig& cfg,
                     double lambda_xing) {
    validate(cfg);
    const int w = target.width();
    const int h = target.height();
    const int steps = cfg.flatten_steps;
    const double eps = cfg.smoothing;
    const std::size_t npaths = doc.paths.size();

    std::vector<FlatPath> flat;
    flat.reserve(npaths);
    for (const BezierPath& p : doc.paths) flat.push_back(flatten(p, steps));

    LossValue out;
    out.grad.paths.resize(npaths);
    std::vector<std::vector<Point2>> vgrad(npaths);
    for (std::size_t k = 0; k < npaths; ++k) {
        out.grad.paths[k].points.assign(doc.paths[k].points().size(), Point2{});
        vgrad[k].assign(flat[k].verts.size(), Point2{});
    }

    struct Layer {
        std::size_t path;
        double alpha;
        bool active;  // coverage strictly inside (0, 1)
        Rgb below;
        Hit hit;
    };
    std::vector<Layer> layers;
    layers.reserve(npaths);
    const double norm_px = 3.0 * static_cast<double>(w) * static_cast<double>(h);
    double sq_sum = 0.0;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Point2 q{x + 0.5, y + 0.5};
            layers.clear();
            Rgb c{1.0, 1.0, 1.0};
            for (std::size_t k = 0; k < npaths; ++k) {
                if (outside_band(flat[k], q, eps)) continue;
                const Hit hit = signed_distance(flat[k], q);
                const double raw = coverage_raw(hit.sd, eps);
                const double alpha = std::clamp(raw, 0.0, 1.0);
                if (alpha == 0.0) continue;
                layers.push_back({k, alpha, raw > 0.0 && raw < 1.0, c, hit});
                const Rgb& f = doc.paths[k].fill();
                for (int ch = 0; ch < 3; ++ch) c[ch] = alpha * f[ch] + (1.0 - alpha) * c[ch];
            }
            const Rgb& t = target.at(x, y);
            Rgb g{};
            for (int ch = 0; ch < 3; ++ch) {
                const double r = c[ch] - t[ch];
                sq_sum += r * r;
                g[ch] = 2.0 * r / norm_px;
            }
            for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
                const Rgb& f = doc.paths[it->path].fill();
                PathGradient& pg = out.grad.paths[it->path];
                double dalpha = 0.0;
                for (int ch = 0; ch < 3; ++ch) {
                    pg.fill[ch] += it->alpha * g[ch];
                    dalpha += g[ch] * (f[ch] - it->below[ch]);
                }
                if (it->active && it->hit.dist > 0.0) {
                    const double dsd = dalpha * (-1.0 / (2.0 * eps));
                    const Point2 dir = (1.0 / it->hit.dist) * (it->hit.closest - q);
                    const double coef = dsd * it->hit.sign;
                    auto& vg = vgrad[it->path];
                    const std::size_t e = it->hit.edge;
                    vg[e] += (coef * (1.0 - it->hit.t)) * dir;
                    vg[(e + 1) % vg.size()] += (coef * it->hit.t) * dir;
                }
                for (int ch = 0; ch < 3; ++ch) g[ch] *= (1.0 - it->alpha);
            }
        }
    }
    out.mse = sq_sum / norm_px;

    // Polyline vertices back to control points through the Bernstein weights.
    for (std::size_t k = 0; k < npaths; ++k) {
        auto& pts = out.grad.paths[k].points;
        const std::size_t np = pts.size();
        for (std::size_t s = 0; s < doc.paths[k].segment_count(); ++s) {
            for (int j = 0; j < steps; ++j) {
                const Point2& gv = vgrad[k][s * steps + j];
                const auto b = bernstein(static_cast<double>(j) / steps);
                pts[3 * s] += b[0] * gv;
                pts[3 * s + 1] += b[1] * gv;
                pts[3 * s + 2] += b[2] * gv;
                pts[(3 * s + 3) % np] += b[3] * gv;
            }
        }
    }

    const std::size_t nseg = segment_total(doc);
    if (nseg > 0) {
        const double scale = lambda_xing / static_cast<double>(nseg);
        double sum = 0.0;
        for (std::size_t k = 0; k < npaths; ++k) {
            auto& pts = out.grad.paths[k].points;
            const std::size_t np = pts.size();
            for (std::size_t s = 0; s < doc.paths[k].segment_count(); ++s) {
                sum += xing_segment(doc.paths[k].segment(s), scale, &pts[3 * s], &pts[3 * s + 1], &pts[3 * s + 2],
                                    &pts[(3 * s + 3) % np]);
            }
        }
        out.xing = sum / static_cast<double>(nseg);
    }
    out.total = out.mse + lambda_xing * out.xing;
    return out;
}

}  // namespace segvec
