#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "segvec/error.hpp"
#include "segvec/pipeline.hpp"

namespace py = pybind11;
using namespace segvec;

namespace {

RasterImage image_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 3 || arr.shape(2) != 3) throw std::invalid_argument("expected an (H, W, 3) array");
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    std::vector<Rgb> data(static_cast<std::size_t>(w) * h);
    const double* p = arr.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = {p[3 * i], p[3 * i + 1], p[3 * i + 2]};
    return RasterImage(w, h, std::move(data));
}

py::array_t<double> image_to_array(const RasterImage& img) {
    py::array_t<double> out({img.height(), img.width(), 3});
    double* p = out.mutable_data();
    const auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        for (int c = 0; c < 3; ++c) p[3 * i + c] = px[i][c];
    }
    return out;
}

Mask mask_from_array(const py::array_t<bool, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("expected an (H, W) boolean array");
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    std::vector<std::uint8_t> bits(arr.data(), arr.data() + arr.size());
    return Mask(w, h, std::move(bits));
}

py::array_t<bool> mask_to_array(const Mask& m) {
    py::array_t<bool> out({m.height(), m.width()});
    bool* p = out.mutable_data();
    for (std::size_t i = 0; i < m.bits().size(); ++i) p[i] = m.bits()[i] != 0;
    return out;
}

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Raster to SVG vectorization by filtered segmentation masks and differentiable refinement.";

    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<BezierPath>(m, "BezierPath")
        .def(py::init([](const std::vector<std::pair<double, double>>& pts, const Rgb& fill) {
                 std::vector<Point2> p;
                 for (auto [x, y] : pts) p.push_back({x, y});
                 return BezierPath(std::move(p), fill);
             }),
             py::arg("points"), py::arg("fill"))
        .def_property_readonly("segment_count", &BezierPath::segment_count)
        .def_property_readonly("points",
                               [](const BezierPath& p) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const Point2& q : p.points()) out.emplace_back(q.x, q.y);
                                   return out;
                               })
        .def_property("fill", &BezierPath::fill, &BezierPath::set_fill);

    py::class_<VectorDocument>(m, "VectorDocument")
        .def(py::init([](int w, int h, std::vector<BezierPath> paths) { return VectorDocument{w, h, std::move(paths)}; }),
             py::arg("width"), py::arg("height"), py::arg("paths") = std::vector<BezierPath>{})
        .def_readwrite("width", &VectorDocument::width)
        .def_readwrite("height", &VectorDocument::height)
        .def_readwrite("paths", &VectorDocument::paths)
        .def("__eq__", [](const VectorDocument& a, const VectorDocument& b) { return a == b; });

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("grid_side", &PipelineConfig::grid_side)
        .def_readwrite("impact_threshold", &PipelineConfig::impact_threshold)
        .def_readwrite("segments_per_path", &PipelineConfig::segments_per_path)
        .def_readwrite("phase1_iters", &PipelineConfig::phase1_iters)
        .def_readwrite("phase2_iters", &PipelineConfig::phase2_iters)
        .def_readwrite("omega", &PipelineConfig::omega)
        .def_readwrite("kernel_fraction", &PipelineConfig::kernel_fraction)
        .def_readwrite("lambda_xing", &PipelineConfig::lambda_xing)
        .def_readwrite("tolerance", &PipelineConfig::tolerance)
        .def_readwrite("lr_points", &PipelineConfig::lr_points)
        .def_readwrite("lr_colors", &PipelineConfig::lr_colors)
        .def_readwrite("manifest", &PipelineConfig::manifest);

    m.def("load_image", [](const std::filesystem::path& p) { return image_to_array(load_image(p)); },
          "Load a binary PPM as an (H, W, 3) float array in [0, 1].");
    m.def("save_image", [](py::array_t<double> a, const std::filesystem::path& p) { save_image(image_from_array(a), p); });

    m.def("make_circular_kernel", [](double r) {
        const BinaryKernel k = make_circular_kernel(r);
        py::array_t<bool> out({k.side(), k.side()});
        bool* p = out.mutable_data();
        for (int j = 0; j < k.side(); ++j)
            for (int i = 0; i < k.side(); ++i) p[j * k.side() + i] = k.cell(i, j);
        return out;
    });

    m.def("prompt_segment",
          [](py::array_t<double> img, int x, int y, double tol) {
              return mask_to_array(prompt_segment(image_from_array(img), {x, y}, tol));
          },
          py::arg("image"), py::arg("x"), py::arg("y"), py::arg("tolerance") = kDefaultTolerance);
    m.def("auto_segment",
          [](py::array_t<double> img, int grid, double tol) {
              std::vector<py::array_t<bool>> out;
              for (const Mask& mk : auto_segment(image_from_array(img), grid, tol)) out.push_back(mask_to_array(mk));
              return out;
          },
          py::arg("image"), py::arg("grid_side") = 32, py::arg("tolerance") = kDefaultTolerance);
    m.def("filter_by_impact",
          [](const std::vector<py::array_t<bool, py::array::c_style | py::array::forcecast>>& masks,
             py::array_t<double> img, double threshold) {
              const RasterImage image = image_from_array(img);
              std::vector<Mask> ms;
              for (const auto& a : masks) ms.push_back(mask_from_array(a));
              const FilterResult f = filter_by_impact(ms, image, threshold, Canvas(image.width(), image.height()));
              std::vector<std::size_t> kept;
              for (const ColoredMask& cm : f.kept) kept.push_back(cm.source_index);
              return py::make_tuple(kept, json_to_py(to_json(f.decisions)));
          },
          py::arg("masks"), py::arg("image"), py::arg("threshold") = kDefaultImpactThreshold,
          "Returns (indices of kept masks in z-order, decision list).");
    m.def("trace_mask",
          [](py::array_t<bool, py::array::c_style | py::array::forcecast> mask, py::array_t<double> img, int segments) {
              return trace_mask(mask_from_array(mask), image_from_array(img), segments);
          },
          py::arg("mask"), py::arg("image"), py::arg("segments") = kDefaultSegments);

    m.def("to_svg", &to_svg);
    m.def("parse_svg", [](const std::string& s) { return parse_svg(s); });
    m.def("write_svg", &write_svg);
    m.def("read_svg", &read_svg);
    m.def("stats", [](const VectorDocument& d) {
        const DocumentStats s = stats(d);
        py::dict out;
        out["paths"] = s.path_count;
        out["parameters"] = s.parameter_count;
        out["width"] = s.width;
        out["height"] = s.height;
        return out;
    });

    m.def("render",
          [](const VectorDocument& d, int flatten_steps, double smoothing) {
              return image_to_array(render(d, d.width, d.height, RenderConfig{flatten_steps, smoothing}));
          },
          py::arg("doc"), py::arg("flatten_steps") = RenderConfig{}.flatten_steps,
          py::arg("smoothing") = RenderConfig{}.smoothing);
    m.def("mse_loss", [](py::array_t<double> a, py::array_t<double> b) {
        return mse_loss(image_from_array(a), image_from_array(b));
    });
    m.def("xing_loss", &xing_loss);
    m.def("detect_missing",
          [](py::array_t<double> target, py::array_t<double> rendered, double r, double omega) {
              std::vector<std::pair<int, int>> out;
              for (const PromptPoint& p : detect_missing(image_from_array(target), image_from_array(rendered), r, omega))
                  out.emplace_back(p.x, p.y);
              return out;
          },
          py::arg("target"), py::arg("render"), py::arg("r"), py::arg("omega") = kDefaultOmega);

    m.def("vectorize",
          [](py::array_t<double> img, const PipelineConfig& cfg) {
              const RasterImage image = image_from_array(img);
              VectorizeResult res;
              {
                  py::gil_scoped_release release;
                  res = vectorize(image, cfg);
              }
              return py::make_tuple(res.doc, json_to_py(to_json(res.report)));
          },
          py::arg("image"), py::arg("config") = PipelineConfig{},
          "Vectorize an (H, W, 3) image. Returns (VectorDocument, report dict).");
}
