// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"

using namespace segvec;
using namespace fixtures;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome gradient_check() {
    const auto t0 = Clock::now();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> pos(8.0, 24.0);
    std::uniform_real_distribution<double> rad(5.0, 9.0);
    const RenderConfig cfg;
    const double lambda = 0.01;
    const double h = 1e-3;
    std::size_t checked = 0;
    std::size_t good = 0;
    for (int scene = 0; scene < 10; ++scene) {
        VectorDocument doc{32, 32, {}};
        for (int k = 0; k < 3; ++k) doc.paths.push_back(random_blob(rng, pos(rng), pos(rng), rad(rng)));
        const RasterImage target = random_image(rng, 32, 32);
        const LossValue base = total_loss(doc, target, cfg, lambda);
        auto probe = [&](double& param, double analytic) {
            if (std::abs(analytic) <= 1e-6) return;
            const double keep = param;
            param = keep + h;
            const double up = total_loss(doc, target, cfg, lambda).total;
            param = keep - h;
            const double down = total_loss(doc, target, cfg, lambda).total;
            param = keep;
            const double numeric = (up - down) / (2.0 * h);
            const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric));
            ++checked;
            if (rel < 1e-2) ++good;
        };
        for (std::size_t p = 0; p < doc.paths.size(); ++p) {
            auto pts = doc.paths[p].points();
            for (std::size_t j = 0; j < pts.size(); ++j) {
                probe(pts[j].x, base.grad.paths[p].points[j].x);
                probe(pts[j].y, base.grad.paths[p].points[j].y);
            }
            // Fill channels are stored by value; probe through a copy.
            for (int c = 0; c < 3; ++c) {
                Rgb f = doc.paths[p].fill();
                double v = f[c];
                const double analytic = base.grad.paths[p].fill[c];
                if (std::abs(analytic) <= 1e-6) continue;
                f[c] = v + h;
                doc.paths[p].set_fill(f);
                const double up = total_loss(doc, target, cfg, lambda).total;
                f[c] = v - h;
                doc.paths[p].set_fill(f);
                const double down = total_loss(doc, target, cfg, lambda).total;
                f[c] = v;
                doc.paths[p].set_fill(f);
                const double numeric = (up - down) / (2.0 * h);
                const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric));
                ++checked;
                if (rel < 1e-2) ++good;
            }
        }
    }
    const double secs = seconds_since(t0);
    const double frac = checked == 0 ? 0.0 : static_cast<double>(good) / checked;
    return {checked > 0 && frac >= 0.95 && secs < 60.0,
            fmt("%zu/%zu coordinates within 1e-2 (%.1f%%, need 95%%), %.1f s (limit 60)", good, checked, 100 * frac,
                secs)};
}

Outcome kernel_oracle() {
    for (int r = 1; r <= 10; ++r) {
        const BinaryKernel k = make_circular_kernel(r);
        if (k.side() != 2 * r + 1) return {false, fmt("r=%d: side %d", r, k.side())};
        for (int j = 0; j < k.side(); ++j)
            for (int i = 0; i < k.side(); ++i) {
                const int dx = i - r;
                const int dy = j - r;
                const bool expect = dx * dx + dy * dy <= r * r;
                if (k.cell(i, j) != expect) return {false, fmt("r=%d: cell (%d,%d) differs", r, i, j)};
            }
    }
    return {true, "r = 1..10 identical to brute-force enumeration"};
}

Outcome filter_check() {
    const int w = 128;
    const int h = 128;
    const std::vector<Rect> regions = {{0, 0, 128, 64, {0.9, 0.9, 0.2}},
                                       {0, 64, 64, 128, {0.1, 0.4, 0.8}},
                                       {64, 64, 128, 128, {0.7, 0.2, 0.3}},
                                       {16, 16, 48, 48, {0.2, 0.8, 0.3}},
                                       {80, 80, 112, 112, {0.4, 0.1, 0.6}}};
    const RasterImage img = paint(w, h, regions);
    // Regions 0..2 tile the image; 3 and 4 sit on top of them, so masks for
    // the base regions exclude the inner squares.
    std::vector<Mask> masks;
    for (int i = 0; i < 5; ++i) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h, 0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                int owner = -1;
                for (int k = 0; k < 5; ++k) {
                    const Rect& r = regions[k];
                    if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1) owner = k;
                }
                bits[static_cast<std::size_t>(y) * w + x] = owner == i;
            }
        masks.emplace_back(w, h, std::move(bits));
    }
    const std::vector<Mask> correct = masks;
    masks.push_back(masks[1]);
    masks.push_back(masks[3]);
    masks.push_back(masks[4]);
    masks.push_back(rect_mask(w, h, 100, 10, 101, 11));  // 1 px < 0.01% of 16384
    masks.push_back(rect_mask(w, h, 20, 100, 21, 101));
    std::shuffle(masks.begin(), masks.end(), std::mt19937(3));
    const FilterResult f = filter_by_impact(masks, img, kDefaultImpactThreshold, Canvas(w, h));
    if (f.kept.size() != 5) return {false, fmt("kept %zu masks, expected 5", f.kept.size())};
    std::vector<int> hits(5, 0);
    for (const ColoredMask& cm : f.kept)
        for (int i = 0; i < 5; ++i) hits[i] += cm.mask == correct[i];
    for (int i = 0; i < 5; ++i)
        if (hits[i] != 1) return {false, fmt("region %d kept %d times", i, hits[i])};
    double prev = f.initial_error;
    for (const ImpactDecision& d : f.decisions) {
        if (!d.kept) continue;
        if (d.error > prev) return {false, "kept-error sequence increases"};
        prev = d.error;
    }
    return {true, fmt("kept exactly the 5 regions out of %zu masks; errors non-increasing, final %.3g",
                      masks.size(), prev)};
}

Outcome uncovered_check() {
    ScalarMap alpha(21, 21, 1.0);
    for (int y = 6; y < 15; ++y)
        for (int x = 6; x < 15; ++x) alpha.at(x, y) = 0.0;
    const std::vector<PromptPoint> pts = find_uncovered_points(alpha, 3.0);
    if (pts.empty()) return {false, "no candidate points"};
    for (const PromptPoint& p : pts)
        if (p.x < 6 || p.x > 14 || p.y < 6 || p.y > 14) return {false, fmt("candidate (%d,%d) outside hole", p.x, p.y)};
    const std::vector<PromptPoint> modes = mean_shift(pts, 6.0);
    if (modes.size() != 1) return {false, fmt("%zu modes", modes.size())};
    const double d = std::hypot(modes[0].x - 10.0, modes[0].y - 10.0);
    return {d <= 2.0, fmt("%zu candidates inside the hole, 1 mode at (%d,%d), %.2f px from centre", pts.size(),
                          modes[0].x, modes[0].y, d)};
}

// Distance from q to the closed polyline through pts.
double polyline_distance(const std::vector<Point2>& pts, Point2 q) {
    double best = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point2 a = pts[i];
        const Point2 b = pts[(i + 1) % pts.size()];
        const Point2 ab = b - a;
        const double len2 = dot(ab, ab);
        const double t = len2 > 0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, distance(a + ab * t, q));
    }
    return best;
}

Outcome tracing_check() {
    const Mask disc = disc_mask(64, 64, 32.0, 32.0, 20.0);
    const RasterImage img(64, 64, {0.2, 0.3, 0.4});
    const std::vector<BezierPath> paths = trace_mask(disc, img, 4);
    if (paths.size() != 1) return {false, fmt("%zu paths", paths.size())};
    const std::vector<Contour> contours = extract_contour(disc);
    std::vector<Point2> boundary;
    for (const Pixel& p : contours.front().points) boundary.push_back({p.x + 0.5, p.y + 0.5});
    std::vector<Point2> curve;
    for (const CubicSegment& s : paths[0].segments())
        for (int i = 0; i < 200; ++i) curve.push_back(s.eval(i / 200.0));
    double dev = 0.0;
    for (const Point2& q : curve) dev = std::max(dev, polyline_distance(boundary, q));
    for (const Point2& q : boundary) dev = std::max(dev, polyline_distance(curve, q));
    return {dev <= 2.0 && paths[0].segment_count() == 4,
            fmt("4 segments, symmetric max deviation %.3f px (limit 2)", dev)};
}

Outcome missing_check() {
    const Rgb bg_rect{0.3, 0.6, 0.9};
    const RasterImage target = paint(64, 64, {{8, 8, 56, 56, bg_rect}, {36, 20, 44, 28, {0.95, 0.85, 0.1}}});
    VectorDocument doc{64, 64, {rect_path(8, 8, 56, 56, bg_rect)}};
    const RasterImage current = render(doc, 64, 64);
    const double r = region_radius(64, 64);
    const std::vector<PromptPoint> centres = detect_missing(target, current, r, kDefaultOmega);
    if (centres.size() != 1) return {false, fmt("%zu centres", centres.size())};
    const PromptPoint c = centres[0];
    if (c.x < 36 || c.x >= 44 || c.y < 20 || c.y >= 28) return {false, fmt("centre (%d,%d) outside block", c.x, c.y)};
    const MissingRound round = refine_missing(doc, target, PipelineConfig{});
    const double reduction = 1.0 - round.mse_after / round.mse_before;
    return {reduction >= 0.5, fmt("one centre at (%d,%d); stage-4 MSE %.3g -> %.3g (%.1f%% reduction, need 50%%)",
                                  c.x, c.y, round.mse_before, round.mse_after, 100 * reduction)};
}

VectorizeResult e2e_run;
std::string e2e_svg;
double e2e_seconds = 0.0;

Outcome end_to_end() {
    const auto t0 = Clock::now();
    e2e_run = vectorize(three_rectangles());
    e2e_seconds = seconds_since(t0);
    e2e_svg = to_svg(e2e_run.doc);
    const auto& rep = e2e_run.report;
    return {rep.final_mse < 1e-3 && rep.stats.path_count <= 5 && e2e_seconds < 120.0,
            fmt("final MSE %.3g (limit 1e-3), %zu paths (limit 5), %.1f s (limit 120)", rep.final_mse,
                rep.stats.path_count, e2e_seconds)};
}

Outcome determinism() {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "segvec_acceptance";
    std::filesystem::create_directories(dir);
    write_svg(e2e_run.doc, dir / "a.svg");
    write_svg(vectorize(three_rectangles()).doc, dir / "b.svg");
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(dir / "a.svg");
    const std::string b = slurp(dir / "b.svg");
    std::filesystem::remove_all(dir);
    return {!a.empty() && a == b, fmt("two runs wrote %zu and %zu bytes, %s", a.size(), b.size(),
                                      a == b ? "identical" : "different")};
}

Outcome round_trip() {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coord(-5.0, 260.0);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> npaths(0, 6);
    std::uniform_int_distribution<int> nseg(1, 7);
    const std::filesystem::path file = std::filesystem::temp_directory_path() / "segvec_roundtrip.svg";
    double worst = 0.0;
    for (int doc_i = 0; doc_i < 100; ++doc_i) {
        VectorDocument doc{1 + byte(rng), 1 + byte(rng), {}};
        const int n = npaths(rng);
        for (int p = 0; p < n; ++p) {
            std::vector<Point2> pts(static_cast<std::size_t>(3 * nseg(rng)));
            for (Point2& q : pts) q = {coord(rng), coord(rng)};
            doc.paths.emplace_back(std::move(pts), Rgb{byte(rng) / 255.0, byte(rng) / 255.0, byte(rng) / 255.0});
        }
        write_svg(doc, file);
        const VectorDocument back = read_svg(file);
        if (back.width != doc.width || back.height != doc.height || back.paths.size() != doc.paths.size())
            return {false, fmt("document %d changed shape", doc_i)};
        for (std::size_t p = 0; p < doc.paths.size(); ++p) {
            if (back.paths[p].fill() != doc.paths[p].fill()) return {false, fmt("document %d fill changed", doc_i)};
            const auto a = doc.paths[p].points();
            const auto b = back.paths[p].points();
            if (a.size() != b.size()) return {false, fmt("document %d point count changed", doc_i)};
            for (std::size_t j = 0; j < a.size(); ++j)
                worst = std::max({worst, std::abs(a[j].x - b[j].x), std::abs(a[j].y - b[j].y)});
        }
    }
    std::filesystem::remove(file);
    return {worst < 0.005, fmt("100 documents, max coordinate error %.9f px (limit 0.005), fills exact", worst)};
}

Outcome optimizer_config() {
    const nlohmann::json j = to_json(e2e_run.report)["optimizer"];
    const double lp = j["lr_points"];
    const double lc = j["lr_colors"];
    const std::size_t p1 = j["phase1_iters"];
    const std::size_t p2 = j["phase2_iters"];
    const std::size_t total = j["total_iters"];
    return {lp == 1.0 && lc == 0.01 && p1 == 500 && p2 == 500 && total == 1000,
            fmt("report: lr_points %g, lr_colors %g, iterations %zu + %zu = %zu", lp, lc, p1, p2, total)};
}

}  // namespace

int main() {
    report(1, "gradient correctness", gradient_check);
    report(2, "circular kernel oracle", kernel_oracle);
    report(3, "filter by impact", filter_check);
    report(4, "uncovered-region detection", uncovered_check);
    report(5, "tracing fidelity", tracing_check);
    report(6, "missing-component loop", missing_check);
    report(7, "end-to-end three rectangles", end_to_end);
    report(8, "determinism", determinism);
    report(9, "svg round-trip", round_trip);
    report(10, "optimizer configuration", optimizer_config);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
