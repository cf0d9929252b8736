#include "depthmark/depth_image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "depthmark/error.hpp"

namespace depthmark {

Eigen::Vector2d Shape::centroid() const {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    if (points.empty()) return c;
    for (const auto& p : points) c += p;
    return c / static_cast<double>(points.size());
}

Eigen::VectorXd Shape::to_vector() const {
    Eigen::VectorXd v(2 * points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        v[2 * i] = points[i].x();
        v[2 * i + 1] = points[i].y();
    }
    return v;
}

Shape Shape::from_vector(const Eigen::VectorXd& v) {
    if (v.size() % 2 != 0)
        throw InvalidArgument("shape vector length must be even, got " +
                              std::to_string(v.size()));
    Shape s;
    s.points.resize(v.size() / 2);
    s.visible.assign(v.size() / 2, 1);
    for (std::size_t i = 0; i < s.points.size(); ++i)
        s.points[i] = Eigen::Vector2d(v[2 * i], v[2 * i + 1]);
    return s;
}

Shape Shape::select(const std::vector<int>& ids) const {
    Shape out;
    out.points.reserve(ids.size());
    out.visible.reserve(ids.size());
    for (int id : ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= points.size())
            throw InvalidArgument("landmark id " + std::to_string(id) +
                                  " out of range for shape of size " +
                                  std::to_string(points.size()));
        out.points.push_back(points[id]);
        out.visible.push_back(visible[id]);
    }
    return out;
}

namespace {

// Token scanner for the P5 header; '#' starts a comment running to end of
// line. Comment text is collected so the metadata lines can be parsed.
struct HeaderScanner {
    std::istream& in;
    std::vector<std::string> comments;

    std::string next_token() {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                comments.push_back(line);
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        return tok;
    }
};

bool parse_comment_value(const std::vector<std::string>& comments,
                         const std::string& key, double* out) {
    for (const auto& c : comments) {
        auto pos = c.find(key + "=");
        if (pos == std::string::npos) continue;
        try {
            *out = std::stod(c.substr(pos + key.size() + 1));
            return true;
        } catch (const std::exception&) {
            throw FormatError(FormatFault::BadHeader,
                              "unparsable header comment: " + c);
        }
    }
    return false;
}

long parse_dim(const std::string& tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        return -1;
    return std::stol(tok);
}

}  // namespace

DepthImage load_depth_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open depth image: " + path);

    HeaderScanner scan{in, {}};
    if (scan.next_token() != "P5")
        throw FormatError(FormatFault::BadHeader, path + ": not a P5 depth file");

    long w = parse_dim(scan.next_token());
    long h = parse_dim(scan.next_token());
    long maxval = parse_dim(scan.next_token());
    if (w < 0 || h < 0 || maxval != 65535)
        throw FormatError(FormatFault::BadHeader,
                          path + ": malformed dimensions or maxval");
    if (w == 0 || h == 0)
        throw FormatError(FormatFault::ZeroDims, path + ": zero image dimensions");

    DepthImage img(static_cast<int>(w), static_cast<int>(h));
    parse_comment_value(scan.comments, "scale_mm_per_unit", &img.scale_mm);
    parse_comment_value(scan.comments, "pitch_mm_per_pixel", &img.pitch_mm);
    if (img.scale_mm <= 0 || img.pitch_mm <= 0)
        throw FormatError(FormatFault::BadValue, path + ": non-positive scale or pitch");

    std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::uint8_t> raw(2 * n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw FormatError(FormatFault::Truncated, path + ": truncated payload");

    for (std::size_t i = 0; i < n; ++i) {
        std::uint16_t v = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
        if (v == 0) continue;  // sentinel: invalid pixel
        img.depth[i] = v * img.scale_mm;
        img.valid[i] = 1;
    }
    return img;
}

void write_depth_image(const DepthImage& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0)
        throw InvalidArgument("cannot write image with empty dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);

    char header[160];
    std::snprintf(header, sizeof(header),
                  "P5\n# scale_mm_per_unit=%.17g\n# pitch_mm_per_pixel=%.17g\n%d %d\n65535\n",
                  img.scale_mm, img.pitch_mm, img.width, img.height);
    out << header;

    std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    std::vector<std::uint8_t> raw(2 * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!img.valid[i]) continue;
        long q = std::lround(img.depth[i] / img.scale_mm);
        if (q < 1) q = 1;  // raw 0 is reserved for invalid
        if (q > 65535) q = 65535;
        raw[2 * i] = static_cast<std::uint8_t>(q >> 8);
        raw[2 * i + 1] = static_cast<std::uint8_t>(q & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::pair<DepthImage, Shape> hflip(const DepthImage& img, const Shape& shape,
                                   const std::vector<int>& mirror_map) {
    if (mirror_map.size() != shape.size())
        throw InvalidArgument("mirror map size does not match landmark count");
    for (std::size_t i = 0; i < mirror_map.size(); ++i) {
        int j = mirror_map[i];
        if (j < 0 || static_cast<std::size_t>(j) >= mirror_map.size() ||
            mirror_map[j] != static_cast<int>(i))
            throw InvalidArgument("mirror map is not an involutive permutation");
    }

    DepthImage flipped = img;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            flipped.depth[flipped.index(x, y)] = img.depth[img.index(img.width - 1 - x, y)];
            flipped.valid[flipped.index(x, y)] = img.valid[img.index(img.width - 1 - x, y)];
        }

    Shape out;
    out.points.resize(shape.size());
    out.visible.resize(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const auto& src = shape.points[mirror_map[i]];
        out.points[i] = Eigen::Vector2d(img.width - 1 - src.x(), src.y());
        out.visible[i] = shape.visible[mirror_map[i]];
    }
    return {std::move(flipped), std::move(out)};
}

}  // namespace depthmark
