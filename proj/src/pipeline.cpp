#include "segvec/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "segvec/error.hpp"

namespace segvec {

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
public:
    explicit StageTimer(std::vector<StageTiming>& out) : out_(out), start_(Clock::now()) {}

    void lap(const char* stage) {
        const auto now = Clock::now();
        out_.push_back({stage, std::chrono::duration<double>(now - start_).count()});
        start_ = now;
    }

private:
    std::vector<StageTiming>& out_;
    Clock::time_point start_;
};

std::vector<Mask> clean_all(const std::vector<Mask>& masks, std::size_t min_area) {
    std::vector<Mask> out;
    out.reserve(masks.size());
    for (const Mask& m : masks) {
        Mask c = clean_mask(m, min_area);
        if (c.area() > 0) out.push_back(std::move(c));
    }
    return out;
}

std::vector<Mask> prompt_masks(const RasterImage& image, const std::vector<PromptPoint>& prompts, double tolerance,
                               std::size_t min_area) {
    std::vector<Mask> out;
    for (const PromptPoint& p : prompts) {
        if (!image.contains(p.x, p.y)) continue;
        Mask m = clean_mask(prompt_segment(image, p, tolerance), min_area);
        if (m.area() > 0) out.push_back(std::move(m));
    }
    return out;
}

// Traces kept masks in order; masks too small or thin to trace are counted.
std::size_t trace_into(const std::vector<ColoredMask>& kept, const RasterImage& image, int segments,
                       std::vector<BezierPath>& paths) {
    std::size_t failures = 0;
    for (const ColoredMask& cm : kept) {
        try {
            auto traced = trace_mask(cm.mask, image, segments);
            if (traced.empty()) ++failures;
            for (BezierPath& p : traced) paths.push_back(std::move(p));
        } catch (const std::invalid_argument&) {
            ++failures;
        }
    }
    return failures;
}

bool is_background(const Rgb& fill) {
    return to_byte(fill[0]) == 255 && to_byte(fill[1]) == 255 && to_byte(fill[2]) == 255;
}

OptimizerState fresh_state(const PipelineConfig& cfg) {
    OptimizerState st;
    st.lr_points = cfg.lr_points;
    st.lr_colors = cfg.lr_colors;
    return st;
}

}  // namespace

void validate(const PipelineConfig& cfg) {
    if (cfg.grid_side < 1) throw ConfigError("grid must be >= 1");
    if (!(cfg.impact_threshold >= 0.0)) throw ConfigError("impact threshold must be >= 0");
    if (cfg.segments_per_path < 2) throw ConfigError("segments must be >= 2");
    if (!(cfg.omega > 0.0 && cfg.omega < 3.0)) throw ConfigError("omega must lie in (0, 3)");
    if (!(cfg.kernel_fraction > 0.0 && cfg.kernel_fraction <= 1.0)) throw ConfigError("kernel fraction must lie in (0, 1]");
    if (!(cfg.lambda_xing >= 0.0)) throw ConfigError("lambda-xing must be >= 0");
    if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
    if (!(cfg.lr_points >= 0.0) || !(cfg.lr_colors >= 0.0)) throw ConfigError("learning rates must be >= 0");
    try {
        validate(cfg.render);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

nlohmann::json to_json(const std::vector<ImpactDecision>& decisions) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ImpactDecision& d : decisions) {
        arr.push_back({{"index", d.mask_index}, {"area", d.area}, {"impact", d.impact}, {"error", d.error},
                       {"kept", d.kept}});
    }
    return arr;
}

nlohmann::json to_json(const PipelineReport& r) {
    nlohmann::json timings = nlohmann::json::object();
    for (const StageTiming& t : r.timings) timings[t.stage] = t.seconds;
    return {
        {"provider", r.provider},
        {"timings_s", timings},
        {"masks",
         {{"generated", r.masks_generated},
          {"after_cleaning", r.masks_after_cleaning},
          {"uncovered_prompts", r.uncovered_prompts},
          {"extra", r.extra_masks},
          {"kept", r.masks_kept}}},
        {"impact_decisions", to_json(r.decisions)},
        {"missing",
         {{"prompts", r.missing_prompts},
          {"decisions", to_json(r.missing_decisions)},
          {"paths_added", r.paths_added_phase2}}},
        {"paths_phase1", r.paths_phase1},
        {"untraceable_masks", r.untraceable_masks},
        {"pruned_background_paths", r.pruned_background_paths},
        {"optimizer",
         {{"lr_points", r.lr_points},
          {"lr_colors", r.lr_colors},
          {"lambda_xing", r.lambda_xing},
          {"phase1_iters", r.phase1_iters},
          {"phase2_iters", r.phase2_iters},
          {"total_iters", r.phase1_iters + r.phase2_iters}}},
        {"phase1_mse", r.phase1_mse},
        {"final_mse", r.final_mse},
        {"stats",
         {{"paths", r.stats.path_count},
          {"parameters", r.stats.parameter_count},
          {"width", r.stats.width},
          {"height", r.stats.height}}},
        {"zero_paths", r.zero_paths},
    };
}

ScalarMap missing_map(const RasterImage& target, const RasterImage& render, double r, double omega) {
    const ScalarMap diff = difference_map(target, render);
    const BinaryKernel kernel = make_circular_kernel(r);
    const ScalarMap sum = convolve_binary(diff, kernel);
    const double cells = static_cast<double>(kernel.count());
    ScalarMap out(diff.width(), diff.height());
    for (int y = 0; y < diff.height(); ++y) {
        for (int x = 0; x < diff.width(); ++x) out.at(x, y) = sum.at(x, y) / cells >= omega ? 1.0 : 0.0;
    }
    return out;
}

std::vector<PromptPoint> detect_missing(const RasterImage& target, const RasterImage& render, double r,
                                        double omega) {
    std::vector<PromptPoint> out;
    for (const Component& c : connected_components(missing_map(target, render, r, omega))) out.push_back(c.centroid);
    return out;
}

MissingRound refine_missing(const VectorDocument& doc, const RasterImage& target, const PipelineConfig& cfg,
                            PipelineArtifacts* artifacts) {
    const int w = target.width();
    const int h = target.height();
    const double r = region_radius(w, h, cfg.kernel_fraction);
    const std::size_t min_area = default_min_area(w, h);

    MissingRound round;
    const RasterImage current = render(doc, w, h, cfg.render);
    round.mse_before = mse_loss(current, target);
    const ScalarMap d2 = missing_map(target, current, r, cfg.omega);
    for (const Component& c : connected_components(d2)) round.prompts.push_back(c.centroid);
    if (artifacts != nullptr) {
        artifacts->missing_map = d2;
        artifacts->missing_prompts = round.prompts;
    }

    round.doc = doc;
    const std::vector<Mask> masks = prompt_masks(target, round.prompts, cfg.tolerance, min_area);
    if (!masks.empty()) {
        const FilterResult f = filter_by_impact(masks, target, cfg.impact_threshold, Canvas::from_image(current));
        round.decisions = f.decisions;
        const std::size_t before = round.doc.paths.size();
        round.untraceable = trace_into(f.kept, target, cfg.segments_per_path, round.doc.paths);
        round.added_paths = round.doc.paths.size() - before;
    }
    if (!round.doc.paths.empty() && cfg.phase2_iters > 0) {
        OptimizerState st = fresh_state(cfg);
        round.doc = optimize(round.doc, target, cfg.phase2_iters, st, cfg.render, cfg.lambda_xing).best;
    }
    round.mse_after = mse_loss(render(round.doc, w, h, cfg.render), target);
    return round;
}

VectorizeResult vectorize(const RasterImage& image, const PipelineConfig& cfg, PipelineArtifacts* artifacts) {
    validate(cfg);
    if (image.empty()) throw std::invalid_argument("vectorize: empty image");
    const int w = image.width();
    const int h = image.height();
    const std::size_t min_area = default_min_area(w, h);
    const double r = region_radius(w, h, cfg.kernel_fraction);

    VectorizeResult out;
    PipelineReport& rep = out.report;
    rep.lr_points = cfg.lr_points;
    rep.lr_colors = cfg.lr_colors;
    rep.lambda_xing = cfg.lambda_xing;
    rep.phase1_iters = cfg.phase1_iters;
    rep.phase2_iters = cfg.phase2_iters;
    rep.provider = cfg.manifest ? "manifest" : "builtin";
    const auto t0 = Clock::now();
    StageTimer timer(rep.timings);

    // Stage 1: masks, Filter by Impact, one extra prompting round for uncovered regions.
    const std::vector<Mask> raw = cfg.manifest ? ingest_masks(*cfg.manifest, image)
                                               : auto_segment(image, cfg.grid_side, cfg.tolerance);
    rep.masks_generated = raw.size();
    std::vector<Mask> masks = clean_all(raw, min_area);
    rep.masks_after_cleaning = masks.size();
    timer.lap("segmentation");

    FilterResult filtered = filter_by_impact(masks, image, cfg.impact_threshold, Canvas(w, h));
    std::vector<Mask> kept_masks;
    for (const ColoredMask& cm : filtered.kept) kept_masks.push_back(cm.mask);
    const ScalarMap alpha = coverage_alpha(kept_masks, w, h);
    const std::vector<PromptPoint> prompts = mean_shift(find_uncovered_points(alpha, r), 2.0 * r);
    rep.uncovered_prompts = prompts.size();
    const std::vector<Mask> extra = prompt_masks(image, prompts, cfg.tolerance, min_area);
    rep.extra_masks = extra.size();
    if (!extra.empty()) {
        kept_masks.insert(kept_masks.end(), extra.begin(), extra.end());
        filtered = filter_by_impact(kept_masks, image, cfg.impact_threshold, Canvas(w, h));
    }
    rep.decisions = filtered.decisions;
    rep.masks_kept = filtered.kept.size();
    if (artifacts != nullptr) {
        artifacts->coverage_alpha = alpha;
        artifacts->uncovered_prompts = prompts;
    }
    timer.lap("filtering");

    // Stage 2: trace, largest masks backmost.
    out.doc.width = w;
    out.doc.height = h;
    rep.untraceable_masks = trace_into(filtered.kept, image, cfg.segments_per_path, out.doc.paths);
    // Backmost paths painted with the background colour change nothing.
    while (!out.doc.paths.empty() && is_background(out.doc.paths.front().fill())) {
        out.doc.paths.erase(out.doc.paths.begin());
        ++rep.pruned_background_paths;
    }
    rep.paths_phase1 = out.doc.paths.size();
    timer.lap("tracing");

    // Stage 3.
    if (!out.doc.paths.empty() && cfg.phase1_iters > 0) {
        OptimizerState st = fresh_state(cfg);
        out.doc = optimize(out.doc, image, cfg.phase1_iters, st, cfg.render, cfg.lambda_xing).best;
    }
    const RasterImage phase1 = render(out.doc, w, h, cfg.render);
    rep.phase1_mse = mse_loss(phase1, image);
    if (artifacts != nullptr) artifacts->phase1_render = phase1;
    timer.lap("optimization_phase1");

    // Stage 4.
    MissingRound round = refine_missing(out.doc, image, cfg, artifacts);
    out.doc = std::move(round.doc);
    rep.missing_prompts = round.prompts.size();
    rep.missing_decisions = std::move(round.decisions);
    rep.paths_added_phase2 = round.added_paths;
    rep.untraceable_masks += round.untraceable;
    timer.lap("missing_components");

    rep.final_mse = mse_loss(render(out.doc, w, h, cfg.render), image);
    rep.stats = stats(out.doc);
    rep.zero_paths = out.doc.paths.empty();
    rep.timings.push_back({"total", std::chrono::duration<double>(Clock::now() - t0).count()});
    return out;
}

}  // namespace segvec
