#include "segvec/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>

#include "segvec/error.hpp"

namespace segvec {

namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("image dimensions must be positive");
    }
}

std::size_t pixel_count(int width, int height) {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Parsed header of a binary netpbm file.
struct PnmHeader {
    char kind = 0;  // '5' or '6'
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t offset = 0;  // first raster byte
};

PnmHeader parse_header(const std::string& bytes, const std::string& name) {
    PnmHeader h;
    std::size_t pos = 0;
    auto fail = [&](const std::string& what) -> PnmHeader {
        throw FormatError(name + ": " + what);
    };
    if (bytes.size() < 2 || bytes[0] != 'P') return fail("not a netpbm file");
    h.kind = bytes[1];
    if (h.kind != '5' && h.kind != '6') return fail(std::string("unsupported netpbm variant P") + h.kind);
    pos = 2;

    auto next_int = [&]() -> int {
        for (;;) {
            while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            fail("truncated or malformed header");
        }
        long v = 0;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1'000'000) fail("header value out of range");
            ++pos;
        }
        return static_cast<int>(v);
    };

    h.width = next_int();
    h.height = next_int();
    h.maxval = next_int();
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        fail("truncated header");
    }
    ++pos;
    h.offset = pos;
    if (h.width == 0 || h.height == 0) fail("zero-dimension image");
    if (h.maxval < 1 || h.maxval > 255) fail("only 8-bit samples are supported");
    const std::size_t channels = h.kind == '6' ? 3 : 1;
    if (bytes.size() - h.offset < pixel_count(h.width, h.height) * channels) fail("truncated pixel data");
    return h;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("cannot read " + path.string());
    return bytes;
}

void write_all(const std::filesystem::path& path, const std::string& header, const std::vector<std::uint8_t>& raster) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << header;
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

RasterImage::RasterImage(int width, int height, const Rgb& fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(pixel_count(width, height), {clamp01(fill[0]), clamp01(fill[1]), clamp01(fill[2])});
}

RasterImage::RasterImage(int width, int height, std::vector<Rgb> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != pixel_count(width, height)) {
        throw std::invalid_argument("image data length does not match dimensions");
    }
    for (const Rgb& c : data_) {
        for (double v : c) {
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("image channel outside [0,1]");
        }
    }
}

void RasterImage::set(int x, int y, const Rgb& c) {
    data_[index(x, y)] = {clamp01(c[0]), clamp01(c[1]), clamp01(c[2])};
}

ScalarMap::ScalarMap(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(pixel_count(width, height), fill);
}

ScalarMap::ScalarMap(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != pixel_count(width, height)) {
        throw std::invalid_argument("map data length does not match dimensions");
    }
}

BinaryKernel::BinaryKernel(double radius, int side, std::vector<std::uint8_t> cells)
    : radius_(radius), side_(side), cells_(std::move(cells)) {
    if (side_ < 1 || side_ % 2 == 0 || cells_.size() != static_cast<std::size_t>(side_ * side_)) {
        throw std::invalid_argument("kernel must be an odd-sided square grid");
    }
}

int BinaryKernel::count() const {
    return static_cast<int>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

RasterImage load_image(const std::filesystem::path& path) {
    const std::string bytes = read_all(path);
    const PnmHeader h = parse_header(bytes, path.string());
    if (h.kind != '6') throw FormatError(path.string() + ": expected a colour (P6) image");
    const double maxval = h.maxval;
    std::vector<Rgb> data(pixel_count(h.width, h.height));
    auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + h.offset);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const int sample = raw[3 * i + c];
            if (sample > h.maxval) throw FormatError(path.string() + ": sample exceeds maxval");
            data[i][c] = sample / maxval;
        }
    }
    return RasterImage(h.width, h.height, std::move(data));
}

void save_image(const RasterImage& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> raster;
    raster.reserve(image.size() * 3);
    for (const Rgb& c : image.pixels()) {
        for (double v : c) raster.push_back(to_byte(v));
    }
    write_all(path, "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n",
              raster);
}

GrayImage load_gray(const std::filesystem::path& path) {
    const std::string bytes = read_all(path);
    const PnmHeader h = parse_header(bytes, path.string());
    if (h.kind != '5') throw FormatError(path.string() + ": expected a grayscale (P5) image");
    GrayImage g{h.width, h.height, {}};
    g.data.resize(pixel_count(h.width, h.height));
    auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + h.offset);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        // Rescale to the 0..255 range so thresholds are maxval-independent.
        g.data[i] = static_cast<std::uint8_t>(std::lround(std::min<int>(raw[i], h.maxval) * 255.0 / h.maxval));
    }
    return g;
}

void save_gray(const GrayImage& image, const std::filesystem::path& path) {
    write_all(path, "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n",
              image.data);
}

BinaryKernel make_circular_kernel(double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw std::invalid_argument("kernel radius must be >= 1");
    const int half = static_cast<int>(std::floor(r));
    const int side = 2 * half + 1;
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(side * side), 0);
    for (int j = 0; j < side; ++j) {
        for (int i = 0; i < side; ++i) {
            const double dx = i - half;
            const double dy = j - half;
            cells[static_cast<std::size_t>(j * side + i)] = std::sqrt(dx * dx + dy * dy) <= r ? 1 : 0;
        }
    }
    return BinaryKernel(r, side, std::move(cells));
}

ScalarMap convolve_binary(const ScalarMap& map, const BinaryKernel& kernel) {
    if (map.empty()) throw std::invalid_argument("convolve_binary: empty map");
    std::vector<std::pair<int, int>> offsets;
    const int half = kernel.half();
    for (int j = 0; j < kernel.side(); ++j) {
        for (int i = 0; i < kernel.side(); ++i) {
            if (kernel.cell(i, j)) offsets.emplace_back(i - half, j - half);
        }
    }
    ScalarMap out(map.width(), map.height());
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            double sum = 0.0;
            for (auto [dx, dy] : offsets) {
                const int sx = x + dx;
                const int sy = y + dy;
                if (map.contains(sx, sy)) sum += map.at(sx, sy);
            }
            out.at(x, y) = sum;
        }
    }
    return out;
}

ScalarMap difference_map(const RasterImage& target, const RasterImage& render) {
    if (target.width() != render.width() || target.height() != render.height()) {
        throw std::invalid_argument("difference_map: dimension mismatch");
    }
    ScalarMap out(target.width(), target.height());
    for (int y = 0; y < target.height(); ++y) {
        for (int x = 0; x < target.width(); ++x) {
            const Rgb& a = target.at(x, y);
            const Rgb& b = render.at(x, y);
            out.at(x, y) = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
        }
    }
    return out;
}

std::vector<Component> connected_components(const ScalarMap& binary) {
    for (double v : binary.values()) {
        if (v != 0.0 && v != 1.0) throw std::invalid_argument("connected_components: map is not binary");
    }
    const int w = binary.width();
    const int h = binary.height();
    std::vector<std::uint8_t> seen(binary.size(), 0);
    std::vector<Component> out;
    std::deque<Pixel> queue;
    constexpr int kDx[4] = {0, -1, 1, 0};
    constexpr int kDy[4] = {-1, 0, 0, 1};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto idx = static_cast<std::size_t>(y) * w + x;
            if (seen[idx] || binary.at(x, y) != 1.0) continue;
            Component comp;
            seen[idx] = 1;
            queue.push_back({x, y});
            double sx = 0.0;
            double sy = 0.0;
            while (!queue.empty()) {
                const Pixel p = queue.front();
                queue.pop_front();
                comp.pixels.push_back(p);
                sx += p.x;
                sy += p.y;
                for (int k = 0; k < 4; ++k) {
                    const int nx = p.x + kDx[k];
                    const int ny = p.y + kDy[k];
                    if (!binary.contains(nx, ny)) continue;
                    const auto nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (seen[nidx] || binary.at(nx, ny) != 1.0) continue;
                    seen[nidx] = 1;
                    queue.push_back({nx, ny});
                }
            }
            const double n = static_cast<double>(comp.pixels.size());
            comp.centroid = {static_cast<int>(std::lround(sx / n)), static_cast<int>(std::lround(sy / n))};
            out.push_back(std::move(comp));
        }
    }
    return out;
}

GrayImage to_gray(const ScalarMap& map, double max_value) {
    GrayImage g{map.width(), map.height(), {}};
    g.data.reserve(map.size());
    for (double v : map.values()) g.data.push_back(to_byte(v / max_value));
    return g;
}

}  // namespace segvec
