#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "segvec/error.hpp"
#include "segvec/pipeline.hpp"

namespace segvec::cli {

namespace {

void add_pipeline_flags(CLI::App& cmd, PipelineConfig& cfg, std::string& manifest) {
    cmd.add_option("--grid", cfg.grid_side, "Prompt grid side for the built-in segmenter")->capture_default_str();
    cmd.add_option("--impact-threshold", cfg.impact_threshold, "Minimum error reduction to keep a mask")
        ->capture_default_str();
    cmd.add_option("--segments", cfg.segments_per_path, "Cubic segments per path")->capture_default_str();
    cmd.add_option("--phase1-iters", cfg.phase1_iters, "Optimization iterations before missing-component detection")
        ->capture_default_str();
    cmd.add_option("--phase2-iters", cfg.phase2_iters, "Optimization iterations after adding missed components")
        ->capture_default_str();
    cmd.add_option("--omega", cfg.omega, "Threshold on the mean-filtered difference map")->capture_default_str();
    cmd.add_option("--kernel-fraction", cfg.kernel_fraction, "Circular kernel radius as a fraction of min(w, h)")
        ->capture_default_str();
    cmd.add_option("--lambda-xing", cfg.lambda_xing, "Weight of the Xing regularizer")->capture_default_str();
    cmd.add_option("--masks", manifest, "Mask manifest (JSON); replaces the built-in segmenter");
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Raster to SVG vectorization by filtered segmentation masks and differentiable refinement", "segvec"};
    app.require_subcommand(1);

    PipelineConfig cfg;
    std::string manifest;
    std::string input;
    std::string output;
    std::string report_path;

    auto* vec = app.add_subcommand("vectorize", "Vectorize a PPM image into an SVG file");
    vec->add_option("input", input, "Input image (binary PPM)")->required();
    vec->add_option("-o,--output", output, "Output SVG")->required();
    vec->add_option("--report", report_path, "Write the pipeline report as JSON");
    add_pipeline_flags(*vec, cfg, manifest);

    std::string svg_path;
    std::string image_path;
    auto* metrics = app.add_subcommand("metrics", "Print MSE, path count and parameter count of an SVG");
    metrics->add_option("svg", svg_path, "SVG produced by vectorize")->required();
    metrics->add_option("image", image_path, "Target image (binary PPM)")->required();

    auto* diag = app.add_subcommand("diagnose", "Write intermediate maps and decisions to a directory");
    diag->add_option("input", input, "Input image (binary PPM)")->required();
    diag->add_option("-o,--output", output, "Output directory")->required();
    add_pipeline_flags(*diag, cfg, manifest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (!manifest.empty()) cfg.manifest = manifest;
        if (*vec) {
            validate(cfg);
            const RasterImage image = load_image(input);
            const VectorizeResult res = vectorize(image, cfg);
            write_svg(res.doc, output);
            if (!report_path.empty()) write_json(to_json(res.report), report_path);
            out << "wrote " << output << ": " << res.report.stats.path_count << " paths, MSE "
                << res.report.final_mse << '\n';
        } else if (*metrics) {
            const VectorDocument doc = read_svg(svg_path);
            const RasterImage target = load_image(image_path);
            if (doc.width != target.width() || doc.height != target.height()) {
                throw FormatError("svg canvas " + std::to_string(doc.width) + "x" + std::to_string(doc.height) +
                                  " does not match image " + std::to_string(target.width()) + "x" +
                                  std::to_string(target.height()));
            }
            const DocumentStats s = stats(doc);
            out << "MSE: " << mse_loss(render(doc, doc.width, doc.height), target) << '\n';
            out << "Paths: " << s.path_count << '\n';
            out << "Num of Parameters: " << s.parameter_count << '\n';
        } else if (*diag) {
            validate(cfg);
            const RasterImage image = load_image(input);
            const std::filesystem::path dir(output);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
            PipelineArtifacts art;
            const VectorizeResult res = vectorize(image, cfg, &art);
            save_gray(to_gray(art.coverage_alpha), dir / "coverage_alpha.pgm");
            save_gray(to_gray(art.missing_map), dir / "missing_map.pgm");
            save_image(art.phase1_render, dir / "phase1_render.ppm");
            write_json(to_json(res.report.decisions), dir / "impact_decisions.json");
            write_json(to_json(res.report), dir / "report.json");
            write_svg(res.doc, dir / "result.svg");
            out << "wrote diagnostics to " << dir.string() << '\n';
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kIo;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
        return kFormat;
    }
    return kOk;
}

}  // namespace segvec::cli
