#include "segvec/vectordoc.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "segvec/error.hpp"
#include "segvec/image.hpp"

namespace segvec {

namespace {

void append_coord(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    // Print -0.00 as 0.00.
    if (buf[0] == '-' && std::strtod(buf, nullptr) == 0.0) {
        out += buf + 1;
    } else {
        out += buf;
    }
}

void append_point(std::string& out, const Point2& p) {
    append_coord(out, p.x);
    out += ',';
    append_coord(out, p.y);
}

// Cursor over the SVG text that reports positions as line:column.
class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& what, std::size_t at) const {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw FormatError("svg " + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
    [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() const { return pos_ >= text_.size(); }
    bool consume(std::string_view lit) {
        if (text_.substr(pos_, lit.size()) == lit) {
            pos_ += lit.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view lit) {
        if (!consume(lit)) fail("expected '" + std::string(lit) + "'");
    }
    std::string name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == ':' ||
                                       text_[pos_] == '-' || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) fail("expected a name");
        return std::string(text_.substr(start, pos_ - start));
    }

    struct Attr {
        std::string value;
        std::size_t offset;  // position of the first value character
    };

    // Attributes up to '>' or '/>'. Returns true for a self-closing tag.
    bool attributes(std::map<std::string, Attr>& out) {
        for (;;) {
            skip_ws();
            if (consume("/>")) return true;
            if (consume(">")) return false;
            if (at_end()) fail("unterminated tag");
            const std::size_t at = pos_;
            const std::string key = name();
            skip_ws();
            expect("=");
            skip_ws();
            if (at_end() || (text_[pos_] != '"' && text_[pos_] != '\'')) fail("expected a quoted attribute value");
            const char quote = text_[pos_++];
            const std::size_t start = pos_;
            const std::size_t end = text_.find(quote, start);
            if (end == std::string_view::npos) fail("unterminated attribute value");
            pos_ = end + 1;
            if (out.count(key)) fail("duplicate attribute '" + key + "'", at);
            out[key] = {std::string(text_.substr(start, end - start)), start};
        }
    }

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

int parse_int(const Reader& r, const Reader::Attr& a, const char* what) {
    int v = 0;
    const char* first = a.value.data();
    const char* last = first + a.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || v <= 0) r.fail(std::string("invalid ") + what, a.offset);
    return v;
}

// Tokenizer for the d attribute.
class PathData {
public:
    PathData(const Reader& r, const Reader::Attr& a) : r_(r), s_(a.value), base_(a.offset) {}

    void skip_sep() {
        while (i_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[i_])) || s_[i_] == ',')) ++i_;
    }
    bool done() {
        skip_sep();
        return i_ >= s_.size();
    }
    char command() {
        skip_sep();
        if (i_ >= s_.size()) r_.fail("unexpected end of path data", base_ + i_);
        const char c = s_[i_];
        if (!std::isalpha(static_cast<unsigned char>(c))) r_.fail("expected a path command", base_ + i_);
        if (c != 'M' && c != 'C' && c != 'Z' && c != 'z') {
            r_.fail(std::string("unsupported path command '") + c + "'", base_ + i_);
        }
        ++i_;
        return c == 'z' ? 'Z' : c;
    }
    double number() {
        skip_sep();
        const std::size_t start = i_;
        if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) ++i_;
        while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
        if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
            ++i_;
            if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) ++i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
        const std::string tok = s_.substr(start, i_ - start);
        char* end = nullptr;
        const double v = tok.empty() ? 0.0 : std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
            r_.fail("expected a coordinate", base_ + start);
        }
        return v;
    }
    Point2 point() {
        const double x = number();
        const double y = number();
        return {x, y};
    }
    std::size_t offset() const { return base_ + i_; }

private:
    const Reader& r_;
    std::string s_;
    std::size_t base_;
    std::size_t i_ = 0;
};

Rgb parse_fill(const Reader& r, const Reader::Attr& a) {
    int c[3] = {0, 0, 0};
    int used = -1;
    if (std::sscanf(a.value.c_str(), " rgb( %d , %d , %d )%n", &c[0], &c[1], &c[2], &used) != 3 || used < 0 ||
        a.value.find_first_not_of(" \t\r\n", static_cast<std::size_t>(used)) != std::string::npos) {
        r.fail("fill must be rgb(r,g,b)", a.offset);
    }
    for (int v : c) {
        if (v < 0 || v > 255) r.fail("fill channel outside 0..255", a.offset);
    }
    return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0};
}

BezierPath parse_path(const Reader& r, const std::map<std::string, Reader::Attr>& attrs, std::size_t tag) {
    for (const auto& [key, attr] : attrs) {
        if (key != "d" && key != "fill" && key != "stroke") r.fail("unsupported path attribute '" + key + "'", tag);
    }
    if (!attrs.count("d") || !attrs.count("fill")) r.fail("path needs d and fill", tag);
    if (attrs.count("stroke") && attrs.at("stroke").value != "none") {
        r.fail("only stroke=\"none\" is supported", attrs.at("stroke").offset);
    }

    PathData d(r, attrs.at("d"));
    if (d.command() != 'M') r.fail("path data must start with M", attrs.at("d").offset);
    const Point2 start = d.point();
    std::vector<Point2> points{start};
    Point2 last = start;
    bool closed = false;
    while (!d.done()) {
        const std::size_t at = d.offset();
        const char c = d.command();
        if (closed) r.fail("commands after Z", at);
        if (c == 'C') {
            const Point2 p1 = d.point();
            const Point2 p2 = d.point();
            last = d.point();
            points.push_back(p1);
            points.push_back(p2);
            points.push_back(last);
        } else if (c == 'Z') {
            closed = true;
        } else {
            r.fail("only one M per path is supported", at);
        }
    }
    if (!closed) r.fail("path is not closed with Z", attrs.at("d").offset);
    if (points.size() < 4) r.fail("path needs at least one C segment", attrs.at("d").offset);
    if (!(last == start)) r.fail("last segment must end at the start point", attrs.at("d").offset);
    points.pop_back();
    return BezierPath(std::move(points), parse_fill(r, attrs.at("fill")));
}

}  // namespace

DocumentStats stats(const VectorDocument& doc) {
    DocumentStats s;
    s.width = doc.width;
    s.height = doc.height;
    s.path_count = doc.paths.size();
    for (const BezierPath& p : doc.paths) s.parameter_count += 2 * p.points().size() + 3;
    return s;
}

std::string to_svg(const VectorDocument& doc) {
    const std::string w = std::to_string(doc.width);
    const std::string h = std::to_string(doc.height);
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w + "\" height=\"" + h +
           "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
    for (const BezierPath& path : doc.paths) {
        out += "  <path d=\"M ";
        const auto pts = path.points();
        append_point(out, pts[0]);
        for (std::size_t s = 0; s < path.segment_count(); ++s) {
            const CubicSegment seg = path.segment(s);
            out += " C ";
            append_point(out, seg.p1);
            out += ' ';
            append_point(out, seg.p2);
            out += ' ';
            append_point(out, seg.p3);
        }
        out += " Z\" fill=\"rgb(";
        const Rgb& f = path.fill();
        out += std::to_string(to_byte(f[0])) + "," + std::to_string(to_byte(f[1])) + "," +
               std::to_string(to_byte(f[2]));
        out += ")\" stroke=\"none\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_svg(const VectorDocument& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_svg(doc);
    if (!out) throw IoError("cannot write " + path.string());
}

VectorDocument parse_svg(std::string_view text) {
    Reader r(text);
    r.skip_ws();
    if (r.consume("<?xml")) {
        const std::size_t end = text.find("?>", r.pos());
        if (end == std::string_view::npos) r.fail("unterminated XML declaration");
        r.seek(end + 2);
        r.skip_ws();
    }
    const std::size_t svg_at = r.pos();
    r.expect("<svg");
    std::map<std::string, Reader::Attr> attrs;
    if (r.attributes(attrs)) r.fail("empty svg element", svg_at);
    for (const auto& [key, attr] : attrs) {
        if (key != "xmlns" && key != "version" && key != "width" && key != "height" && key != "viewBox") {
            r.fail("unsupported svg attribute '" + key + "'", svg_at);
        }
    }
    if (!attrs.count("width") || !attrs.count("height")) r.fail("svg needs width and height", svg_at);
    VectorDocument doc;
    doc.width = parse_int(r, attrs.at("width"), "width");
    doc.height = parse_int(r, attrs.at("height"), "height");
    if (attrs.count("viewBox")) {
        const std::string expect = "0 0 " + std::to_string(doc.width) + " " + std::to_string(doc.height);
        if (attrs.at("viewBox").value != expect) r.fail("viewBox must be '" + expect + "'", attrs.at("viewBox").offset);
    }

    for (;;) {
        r.skip_ws();
        if (r.at_end()) r.fail("missing </svg>");
        const std::size_t at = r.pos();
        if (r.consume("</svg>")) break;
        if (!r.consume("<")) r.fail("unexpected text");
        const std::string tag = r.name();
        if (tag != "path") r.fail("unsupported element <" + tag + ">", at);
        std::map<std::string, Reader::Attr> pattrs;
        if (!r.attributes(pattrs)) r.fail("path elements must be self-closing", at);
        doc.paths.push_back(parse_path(r, pattrs, at));
    }
    r.skip_ws();
    if (!r.at_end()) r.fail("trailing content after </svg>");
    return doc;
}

VectorDocument read_svg(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_svg(text);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace segvec
