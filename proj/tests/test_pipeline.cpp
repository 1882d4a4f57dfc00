#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "segvec/error.hpp"

using namespace segvec;
using namespace fixtures;

namespace {

PipelineConfig quick() {
    PipelineConfig cfg;
    cfg.phase1_iters = 40;
    cfg.phase2_iters = 40;
    return cfg;
}

}  // namespace

TEST_CASE("config validation names the field") {
    PipelineConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.segments_per_path = 1;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.omega = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.kernel_fraction = 1.5;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.render.smoothing = -1.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.grid_side = 0;
    try {
        validate(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("grid") != std::string::npos);
    }
}

TEST_CASE("missing map matches a direct disc average") {
    const RasterImage target = paint(30, 30, {{10, 10, 18, 18, {0, 0, 0}}});
    const RasterImage blank(30, 30);
    const double r = 3.0;
    const ScalarMap m = missing_map(target, blank, r, kDefaultOmega);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 30; ++x) {
            double sum = 0.0;
            int cells = 0;
            for (int dy = -3; dy <= 3; ++dy)
                for (int dx = -3; dx <= 3; ++dx) {
                    if (dx * dx + dy * dy > 9) continue;
                    ++cells;
                    const int px = x + dx, py = y + dy;
                    if (px >= 10 && px < 18 && py >= 10 && py < 18) sum += 3.0;
                }
            CHECK(m.at(x, y) == (sum / cells >= kDefaultOmega ? 1.0 : 0.0));
        }
}

TEST_CASE("detect missing finds nothing when the render is exact") {
    const RasterImage img = three_rectangles();
    CHECK(detect_missing(img, img, 3.0, kDefaultOmega).empty());
}

TEST_CASE("detect missing finds one centre per missing block") {
    const RasterImage target =
        paint(64, 64, {{5, 5, 15, 15, {0, 0, 0}}, {40, 40, 52, 50, {0.1, 0.1, 0.9}}});
    const auto centres = detect_missing(target, RasterImage(64, 64), 3.0, kDefaultOmega);
    REQUIRE(centres.size() == 2);
    CHECK(centres[0] == Pixel{10, 10});
    CHECK(centres[1] == Pixel{46, 45});
}

TEST_CASE("blank image gives an empty document") {
    const VectorizeResult r = vectorize(RasterImage(32, 32), quick());
    CHECK(r.doc.paths.empty());
    CHECK(r.report.zero_paths);
    CHECK(r.report.final_mse == 0.0);
    CHECK(to_svg(r.doc).find("<path") == std::string::npos);
}

TEST_CASE("vectorize reports its stages") {
    PipelineArtifacts art;
    const VectorizeResult r = vectorize(three_rectangles(), quick(), &art);
    const auto& rep = r.report;
    CHECK(rep.provider == "builtin");
    CHECK(rep.stats.path_count == r.doc.paths.size());
    CHECK(rep.stats.parameter_count == parameter_count(r.doc));
    CHECK(rep.final_mse <= rep.phase1_mse + 1e-12);
    CHECK(rep.masks_kept >= 3);
    CHECK(rep.pruned_background_paths == 1);
    CHECK(art.coverage_alpha.width() == 64);
    CHECK(art.phase1_render.width() == 64);
    std::vector<std::string> stages;
    for (const StageTiming& t : rep.timings) stages.push_back(t.stage);
    CHECK(stages == std::vector<std::string>{"segmentation", "filtering", "tracing", "optimization_phase1",
                                             "missing_components", "total"});
    const nlohmann::json j = to_json(rep);
    CHECK(j["optimizer"]["total_iters"] == 80);
    CHECK(j["stats"]["paths"] == rep.stats.path_count);
    CHECK(j["impact_decisions"].size() == rep.decisions.size());
}

TEST_CASE("stage four adds a path for a missing block") {
    const Rgb base{0.3, 0.6, 0.9};
    const RasterImage target = paint(48, 48, {{4, 4, 44, 44, base}, {20, 20, 30, 30, {0.9, 0.1, 0.1}}});
    const VectorDocument doc{48, 48, {rect_path(4, 4, 44, 44, base)}};
    PipelineArtifacts art;
    const MissingRound round = refine_missing(doc, target, quick(), &art);
    CHECK(round.prompts.size() == 1);
    CHECK(round.added_paths == 1);
    CHECK(round.doc.paths.size() == 2);
    CHECK(round.mse_after < 0.2 * round.mse_before);
    CHECK(art.missing_prompts == round.prompts);
}

TEST_CASE("manifest provider feeds the same pipeline") {
    const auto dir = std::filesystem::temp_directory_path() / "segvec_pipeline_manifest";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const RasterImage img = three_rectangles();
    nlohmann::json entries = nlohmann::json::array();
    int i = 0;
    for (const Mask& m : auto_segment(img, 8)) {
        GrayImage g{64, 64, {}};
        for (auto b : m.bits()) g.data.push_back(b ? 255 : 0);
        const std::string name = "m" + std::to_string(i++) + ".pgm";
        save_gray(g, dir / name);
        entries.push_back({{"file", name}, {"confidence", 1.0}});
    }
    {
        std::ofstream out(dir / "masks.json");
        out << nlohmann::json{{"width", 64}, {"height", 64}, {"entries", entries}}.dump();
    }
    PipelineConfig cfg = quick();
    cfg.manifest = dir / "masks.json";
    const VectorizeResult from_manifest = vectorize(img, cfg);
    const VectorizeResult builtin = vectorize(img, quick());
    CHECK(from_manifest.report.provider == "manifest");
    CHECK(from_manifest.report.masks_generated == 4);
    CHECK(to_svg(from_manifest.doc) == to_svg(builtin.doc));
    std::filesystem::remove_all(dir);
}

TEST_CASE("vectorize rejects an invalid config before doing work") {
    PipelineConfig cfg;
    cfg.lambda_xing = -1.0;
    CHECK_THROWS_AS(vectorize(three_rectangles(), cfg), ConfigError);
}
