#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "segvec/image.hpp"
#include "segvec/optimize.hpp"
#include "segvec/render.hpp"
#include "segvec/segmentation.hpp"
#include "segvec/selection.hpp"
#include "segvec/tracing.hpp"
#include "segvec/vectordoc.hpp"

namespace segvec {

inline constexpr double kDefaultOmega = 0.784;

struct PipelineConfig {
    int grid_side = 32;
    double impact_threshold = kDefaultImpactThreshold;
    int segments_per_path = kDefaultSegments;
    std::size_t phase1_iters = 500;
    std::size_t phase2_iters = 500;
    double omega = kDefaultOmega;
    double kernel_fraction = 0.03;
    double lambda_xing = 0.01;
    double tolerance = kDefaultTolerance;
    double lr_points = kLrPoints;
    double lr_colors = kLrColors;
    RenderConfig render;
    // Unset: built-in grid segmenter. Set: masks come from this manifest.
    std::optional<std::filesystem::path> manifest;
};

// Throws ConfigError naming the offending field.
void validate(const PipelineConfig& cfg);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct PipelineReport {
    std::vector<StageTiming> timings;
    std::string provider;
    std::size_t masks_generated = 0;
    std::size_t masks_after_cleaning = 0;
    std::size_t uncovered_prompts = 0;
    std::size_t extra_masks = 0;
    std::size_t masks_kept = 0;
    std::vector<ImpactDecision> decisions;  // final stage-1 filtering pass
    std::size_t missing_prompts = 0;
    std::vector<ImpactDecision> missing_decisions;
    std::size_t paths_phase1 = 0;
    std::size_t paths_added_phase2 = 0;
    std::size_t untraceable_masks = 0;
    std::size_t pruned_background_paths = 0;
    std::size_t phase1_iters = 0;
    std::size_t phase2_iters = 0;
    double lr_points = 0.0;
    double lr_colors = 0.0;
    double lambda_xing = 0.0;
    double phase1_mse = 0.0;
    double final_mse = 0.0;
    DocumentStats stats;
    bool zero_paths = false;
};

nlohmann::json to_json(const PipelineReport& report);
nlohmann::json to_json(const std::vector<ImpactDecision>& decisions);

// Intermediate maps for diagnostics.
struct PipelineArtifacts {
    ScalarMap coverage_alpha;
    ScalarMap missing_map;
    RasterImage phase1_render;
    std::vector<PromptPoint> uncovered_prompts;
    std::vector<PromptPoint> missing_prompts;
};

// Thresholded, mean-filtered difference map: 1 where the disc average of
// sum_c |target - render| reaches omega.
ScalarMap missing_map(const RasterImage& target, const RasterImage& render, double r, double omega);

// Centroids of the components of missing_map.
std::vector<PromptPoint> detect_missing(const RasterImage& target, const RasterImage& render, double r,
                                        double omega);

struct MissingRound {
    VectorDocument doc;
    std::vector<PromptPoint> prompts;
    std::vector<ImpactDecision> decisions;
    std::size_t added_paths = 0;
    std::size_t untraceable = 0;
    double mse_before = 0.0;
    double mse_after = 0.0;
};

// Detect missing components of doc against target, prompt the segmenter at
// their centres, filter the new masks against the current render, trace the
// survivors on top and optimize for cfg.phase2_iters.
MissingRound refine_missing(const VectorDocument& doc, const RasterImage& target, const PipelineConfig& cfg,
                            PipelineArtifacts* artifacts = nullptr);

struct VectorizeResult {
    VectorDocument doc;
    PipelineReport report;
};

VectorizeResult vectorize(const RasterImage& image, const PipelineConfig& cfg = {},
                          PipelineArtifacts* artifacts = nullptr);

}  // namespace segvec
