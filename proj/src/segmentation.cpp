#include "segvec/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "segvec/error.hpp"

namespace segvec {

namespace {

constexpr int kDx[4] = {0, -1, 1, 0};
constexpr int kDy[4] = {-1, 0, 0, 1};

// Labels 4-connected runs of pixels whose bit equals `value`. Returns the
// label map (-1 for other pixels) and the size of each label.
struct Labels {
    std::vector<int> label;
    std::vector<std::size_t> size;
    std::vector<bool> touches_border;
};

Labels label_components(const std::vector<std::uint8_t>& bits, int w, int h, std::uint8_t value) {
    Labels out;
    out.label.assign(bits.size(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < bits.size(); ++start) {
        if (bits[start] != value || out.label[start] >= 0) continue;
        const int id = static_cast<int>(out.size.size());
        out.size.push_back(0);
        out.touches_border.push_back(false);
        out.label[start] = id;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            ++out.size[id];
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) out.touches_border[id] = true;
            for (int k = 0; k < 4; ++k) {
                const int nx = x + kDx[k];
                const int ny = y + kDy[k];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
                if (bits[n] != value || out.label[n] >= 0) continue;
                out.label[n] = id;
                queue.push_back(n);
            }
        }
    }
    return out;
}

double rgb_distance(const Rgb& a, const Rgb& b) {
    const double dr = a[0] - b[0];
    const double dg = a[1] - b[1];
    const double db = a[2] - b[2];
    return std::sqrt(dr * dr + dg * dg + db * db);
}

}  // namespace

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits, double confidence)
    : width_(width), height_(height), bits_(std::move(bits)), confidence_(confidence) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("mask dimensions must be positive");
    if (bits_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("mask bit count does not match dimensions");
    }
    if (!(confidence >= 0.0 && confidence <= 1.0)) throw std::invalid_argument("mask confidence outside [0,1]");
    for (auto& b : bits_) b = b ? 1 : 0;
    area_ = static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t Mask::first_pixel() const {
    const auto it = std::find(bits_.begin(), bits_.end(), std::uint8_t{1});
    return static_cast<std::size_t>(it - bits_.begin());
}

std::size_t default_min_area(int width, int height) {
    const double a = std::ceil(0.0005 * static_cast<double>(width) * static_cast<double>(height));
    return std::max<std::size_t>(1, static_cast<std::size_t>(a));
}

double iou(const Mask& a, const Mask& b) {
    if (a.width() != b.width() || a.height() != b.height()) throw std::invalid_argument("iou: dimension mismatch");
    std::size_t inter = 0;
    const auto& ab = a.bits();
    const auto& bb = b.bits();
    for (std::size_t i = 0; i < ab.size(); ++i) inter += ab[i] & bb[i];
    const std::size_t uni = a.area() + b.area() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Mask> ingest_masks(const std::filesystem::path& manifest_path, const RasterImage& image) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open mask manifest " + manifest_path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(manifest_path.string() + ": malformed manifest: " + e.what());
    }

    const std::string name = manifest_path.string();
    if (!doc.is_object() || !doc.contains("width") || !doc.contains("height") || !doc.contains("entries") ||
        !doc["width"].is_number_integer() || !doc["height"].is_number_integer() || !doc["entries"].is_array()) {
        throw FormatError(name + ": manifest needs integer width, height and an entries array");
    }
    const int mw = doc["width"].get<int>();
    const int mh = doc["height"].get<int>();
    if (mw != image.width() || mh != image.height()) {
        throw FormatError(name + ": manifest is " + std::to_string(mw) + "x" + std::to_string(mh) +
                          " but the image is " + std::to_string(image.width()) + "x" +
                          std::to_string(image.height()));
    }

    const auto base = manifest_path.parent_path();
    std::vector<Mask> masks;
    std::size_t index = 0;
    for (const auto& entry : doc["entries"]) {
        const std::string where = name + " entry " + std::to_string(index);
        if (!entry.is_object() || !entry.contains("file") || !entry["file"].is_string()) {
            throw FormatError(where + ": missing file");
        }
        double confidence = 1.0;
        if (entry.contains("confidence")) {
            if (!entry["confidence"].is_number()) throw FormatError(where + ": confidence must be a number");
            confidence = entry["confidence"].get<double>();
            if (!(confidence >= 0.0 && confidence <= 1.0)) throw FormatError(where + ": confidence outside [0,1]");
        }
        const std::filesystem::path file = base / entry["file"].get<std::string>();
        const GrayImage gray = load_gray(file);
        if (gray.width != image.width() || gray.height != image.height()) {
            throw FormatError(where + " (" + file.filename().string() + "): mask is " + std::to_string(gray.width) +
                              "x" + std::to_string(gray.height) + ", image is " + std::to_string(image.width()) + "x" +
                              std::to_string(image.height()));
        }
        std::vector<std::uint8_t> bits(gray.data.size());
        std::transform(gray.data.begin(), gray.data.end(), bits.begin(),
                       [](std::uint8_t v) { return static_cast<std::uint8_t>(v > 127); });
        masks.emplace_back(gray.width, gray.height, std::move(bits), confidence);
        ++index;
    }
    return masks;
}

Mask prompt_segment(const RasterImage& image, PromptPoint seed, double tolerance) {
    if (!image.contains(seed.x, seed.y)) throw std::invalid_argument("prompt_segment: seed outside image");
    if (!(tolerance > 0.0)) throw std::invalid_argument("prompt_segment: tolerance must be positive");

    const int w = image.width();
    const int h = image.height();
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h, 0);
    Rgb sum = image.at(seed.x, seed.y);
    double count = 1.0;
    std::deque<Pixel> queue{seed};
    bits[static_cast<std::size_t>(seed.y) * w + seed.x] = 1;

    while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        // Neighbours in row-major order: up, left, right, down.
        for (int k = 0; k < 4; ++k) {
            const int nx = p.x + kDx[k];
            const int ny = p.y + kDy[k];
            if (!image.contains(nx, ny)) continue;
            auto& bit = bits[static_cast<std::size_t>(ny) * w + nx];
            if (bit) continue;
            const Rgb mean{sum[0] / count, sum[1] / count, sum[2] / count};
            const Rgb& c = image.at(nx, ny);
            if (rgb_distance(c, mean) > tolerance) continue;
            bit = 1;
            for (int ch = 0; ch < 3; ++ch) sum[ch] += c[ch];
            count += 1.0;
            queue.push_back({nx, ny});
        }
    }
    return Mask(w, h, std::move(bits));
}

std::vector<Mask> auto_segment(const RasterImage& image, int grid_side, double tolerance) {
    if (grid_side < 1) throw std::invalid_argument("auto_segment: grid_side must be >= 1");
    const int w = image.width();
    const int h = image.height();

    std::vector<Mask> candidates;
    candidates.reserve(static_cast<std::size_t>(grid_side) * grid_side);
    for (int gy = 0; gy < grid_side; ++gy) {
        for (int gx = 0; gx < grid_side; ++gx) {
            const int x = std::min(w - 1, static_cast<int>((gx + 0.5) * w / grid_side));
            const int y = std::min(h - 1, static_cast<int>((gy + 0.5) * h / grid_side));
            candidates.push_back(prompt_segment(image, {x, y}, tolerance));
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Mask& a, const Mask& b) { return a.area() > b.area(); });
    std::vector<Mask> kept;
    for (Mask& m : candidates) {
        if (m.area() == 0) continue;
        bool duplicate = false;
        for (const Mask& k : kept) {
            // IoU is bounded by the area ratio; skip the pixel pass when that already rules it out.
            if (static_cast<double>(m.area()) / static_cast<double>(k.area()) <= kDedupIou) continue;
            if (iou(m, k) > kDedupIou) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) kept.push_back(std::move(m));
    }
    return kept;
}

Mask clean_mask(const Mask& mask, std::size_t min_area) {
    if (min_area < 1) throw std::invalid_argument("clean_mask: min_area must be >= 1");
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> bits = mask.bits();

    const Labels fg = label_components(bits, w, h, 1);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (fg.label[i] >= 0 && fg.size[static_cast<std::size_t>(fg.label[i])] < min_area) bits[i] = 0;
    }
    const Labels bg = label_components(bits, w, h, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bg.label[i] < 0) continue;
        const auto id = static_cast<std::size_t>(bg.label[i]);
        if (!bg.touches_border[id] && bg.size[id] < min_area) bits[i] = 1;
    }
    return Mask(w, h, std::move(bits), mask.confidence());
}

}  // namespace segvec
