#include "depthmark/features.hpp"

#include <array>
#include <cmath>

#include "depthmark/error.hpp"

namespace depthmark {

namespace {

constexpr double kPi = 3.14159265358979323846;

int round_px(double v) { return static_cast<int>(std::lround(v)); }

// 8 integer neighbors of radius 1 in circular order, starting east.
constexpr std::array<std::array<int, 2>, 8> kLbpNeighbors = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

// Uniform-pattern lookup: patterns with at most two 0/1 transitions get
// their own bin (58 of them), everything else shares bin 58.
const std::array<int, 256>& uniform_lbp_table() {
    static const std::array<int, 256> table = [] {
        std::array<int, 256> t{};
        int next = 0;
        for (int p = 0; p < 256; ++p) {
            int transitions = 0;
            for (int b = 0; b < 8; ++b) {
                int cur = (p >> b) & 1;
                int nxt = (p >> ((b + 1) % 8)) & 1;
                if (cur != nxt) ++transitions;
            }
            t[p] = transitions <= 2 ? next++ : -1;
        }
        for (int p = 0; p < 256; ++p)
            if (t[p] < 0) t[p] = 58;
        return t;
    }();
    return table;
}

}  // namespace

int hog_length(const HogConfig& cfg, int num_landmarks) {
    return num_landmarks * cfg.cells_per_side * cfg.cells_per_side * cfg.bins;
}

int lbp_length(int num_landmarks) { return num_landmarks * 59; }

int feature_length(const FeatureSpec& spec, int num_landmarks) {
    return spec.kind == FeatureKind::Hog ? hog_length(spec.hog, num_landmarks)
                                         : lbp_length(num_landmarks);
}

Eigen::VectorXd extract_hog(const DepthImage& img, const Shape& shape, const HogConfig& cfg) {
    if (cfg.bins < 2) throw InvalidArgument("hog: bins must be >= 2");
    if (cfg.cells_per_side < 1 || cfg.patch_side % cfg.cells_per_side != 0)
        throw InvalidArgument("hog: patch_side must be divisible by cells_per_side");

    const int side = cfg.patch_side;
    const int cells = cfg.cells_per_side;
    const int cell_px = side / cells;
    const int per_landmark = cells * cells * cfg.bins;

    Eigen::VectorXd out = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(shape.size()) * per_landmark);

    for (std::size_t lm = 0; lm < shape.size(); ++lm) {
        const int cx = round_px(shape.points[lm].x());
        const int cy = round_px(shape.points[lm].y());
        const int x0 = cx - side / 2;
        const int y0 = cy - side / 2;
        Eigen::VectorXd hist = Eigen::VectorXd::Zero(per_landmark);

        for (int py = 0; py < side; ++py)
            for (int px = 0; px < side; ++px) {
                int x = x0 + px, y = y0 + py;
                double gx = img.sample(x + 1, y) - img.sample(x - 1, y);
                double gy = img.sample(x, y + 1) - img.sample(x, y - 1);
                double mag = std::sqrt(gx * gx + gy * gy);
                if (mag == 0.0) continue;
                double theta = std::atan2(gy, gx);
                if (theta < 0) theta += kPi;            // unsigned orientation
                int bin = static_cast<int>(theta / kPi * cfg.bins);
                if (bin >= cfg.bins) bin = cfg.bins - 1;
                int cell = (py / cell_px) * cells + (px / cell_px);
                hist[cell * cfg.bins + bin] += mag;
            }

        for (int cell = 0; cell < cells * cells; ++cell) {
            auto block = hist.segment(cell * cfg.bins, cfg.bins);
            double norm = block.norm();
            block /= std::max(norm, cfg.epsilon);
        }
        out.segment(static_cast<Eigen::Index>(lm) * per_landmark, per_landmark) = hist;
    }
    return out;
}

Eigen::VectorXd extract_lbp(const DepthImage& img, const Shape& shape, const LbpConfig& cfg) {
    const int side = cfg.patch_side;
    const auto& table = uniform_lbp_table();

    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(shape.size()) * 59);
    for (std::size_t lm = 0; lm < shape.size(); ++lm) {
        const int cx = round_px(shape.points[lm].x());
        const int cy = round_px(shape.points[lm].y());
        const int x0 = cx - side / 2;
        const int y0 = cy - side / 2;
        auto hist = out.segment(static_cast<Eigen::Index>(lm) * 59, 59);

        for (int py = 0; py < side; ++py)
            for (int px = 0; px < side; ++px) {
                int x = x0 + px, y = y0 + py;
                double center = img.sample(x, y);
                int pattern = 0;
                for (int n = 0; n < 8; ++n)
                    if (img.sample(x + kLbpNeighbors[n][0], y + kLbpNeighbors[n][1]) > center)
                        pattern |= 1 << n;
                hist[table[pattern]] += 1.0;
            }
        hist /= static_cast<double>(side) * side;  // histogram mass sums to 1
    }
    return out;
}

Eigen::VectorXd extract_features(const DepthImage& img, const Shape& shape,
                                 const FeatureSpec& spec) {
    return spec.kind == FeatureKind::Hog ? extract_hog(img, shape, spec.hog)
                                         : extract_lbp(img, shape, spec.lbp);
}

std::vector<Eigen::VectorXd> extract_depth_diff(const DepthImage& img, const Shape& shape,
                                                int patch_side) {
    if (patch_side < 3 || patch_side % 2 == 0)
        throw InvalidArgument("extract_depth_diff: patch_side must be odd and >= 3");
    const int r = patch_side / 2;
    const int p = patch_side * patch_side - 1;

    std::vector<Eigen::VectorXd> out;
    out.reserve(shape.size());
    for (std::size_t lm = 0; lm < shape.size(); ++lm) {
        const int cx = round_px(shape.points[lm].x());
        const int cy = round_px(shape.points[lm].y());
        const double center = img.sample(cx, cy);
        Eigen::VectorXd d(p);
        int i = 0;
        for (int oy = -r; oy <= r; ++oy)
            for (int ox = -r; ox <= r; ++ox) {
                if (ox == 0 && oy == 0) continue;
                d[i++] = img.sample(cx + ox, cy + oy) - center;
            }
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<std::uint8_t> binarize(const Eigen::VectorXd& d, const Eigen::MatrixXd& W) {
    if (W.rows() != d.size())
        throw InvalidArgument("binarize: projection rows (" + std::to_string(W.rows()) +
                              ") do not match vector length (" + std::to_string(d.size()) + ")");
    if (W.cols() < 1) throw InvalidArgument("binarize: projection must have >= 1 column");
    Eigen::VectorXd proj = W.transpose() * d;
    std::vector<std::uint8_t> code(proj.size());
    for (Eigen::Index j = 0; j < proj.size(); ++j)
        code[j] = proj[j] >= 0.0 ? 1 : 0;  // sgn(0) = +1
    return code;
}

}  // namespace depthmark
