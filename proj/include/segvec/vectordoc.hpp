#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "segvec/bezier.hpp"

namespace segvec {

// Paths are painted in list order; index 0 is the backmost.
struct VectorDocument {
    int width = 0;
    int height = 0;
    std::vector<BezierPath> paths;

    friend bool operator==(const VectorDocument&, const VectorDocument&) = default;
};

struct DocumentStats {
    std::size_t path_count = 0;
    // Sum over paths of 2 * distinct control points + 3 fill channels.
    std::size_t parameter_count = 0;
    int width = 0;
    int height = 0;
};

DocumentStats stats(const VectorDocument& doc);

// SVG 1.1 subset: one <path> per BezierPath, absolute M/C/Z commands with two
// decimals, fill="rgb(r,g,b)", no stroke.
std::string to_svg(const VectorDocument& doc);
void write_svg(const VectorDocument& doc, const std::filesystem::path& path);

// Parses the subset emitted by to_svg. Anything else raises FormatError with
// a line:column location.
VectorDocument parse_svg(std::string_view text);
VectorDocument read_svg(const std::filesystem::path& path);

}  // namespace segvec
