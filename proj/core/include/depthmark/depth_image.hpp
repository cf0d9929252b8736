#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace depthmark {

// Rectangular grid of depth samples in millimeters with a validity mask.
// Invalid pixels hold 0.0 as a sentinel; algorithms consult the mask and
// never interpret the sentinel as depth. Treated as immutable once built.
struct DepthImage {
    int width = 0;
    int height = 0;
    std::vector<double> depth;           // row-major, mm
    std::vector<std::uint8_t> valid;     // row-major, 1 = measured
    double scale_mm = 0.1;               // disk quantization step, mm per raw unit
    double pitch_mm = 1.0;               // metric pixel pitch, mm per pixel

    DepthImage() = default;
    DepthImage(int w, int h, double fill = 0.0, bool is_valid = false)
        : width(w), height(h),
          depth(static_cast<std::size_t>(w) * h, fill),
          valid(static_cast<std::size_t>(w) * h, is_valid ? 1 : 0) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    double at(int x, int y) const { return depth[index(x, y)]; }
    double& at(int x, int y) { return depth[index(x, y)]; }
    bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }

    // Replicate-padded read; defined for any (x, y).
    double sample(int x, int y) const {
        x = x < 0 ? 0 : (x >= width ? width - 1 : x);
        y = y < 0 ? 0 : (y >= height ? height - 1 : y);
        return depth[index(x, y)];
    }

    int count_valid() const {
        int n = 0;
        for (auto v : valid) n += v ? 1 : 0;
        return n;
    }
};

// Axis-aligned facial region, pixel units. Fractional coordinates are
// allowed (jittered boxes).
struct FaceBox {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;

    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }
};

// Ordered landmark set in image coordinates plus per-landmark visibility.
// The flat-vector form interleaves coordinates as (x1, y1, ..., xL, yL).
struct Shape {
    std::vector<Eigen::Vector2d> points;
    std::vector<std::uint8_t> visible;

    std::size_t size() const { return points.size(); }

    Eigen::Vector2d centroid() const;
    Eigen::VectorXd to_vector() const;
    static Shape from_vector(const Eigen::VectorXd& v);

    Shape select(const std::vector<int>& ids) const;
};

// Reads the 16-bit big-endian P5 depth format. Raw value 0 marks an
// invalid pixel; `# scale_mm_per_unit=` and `# pitch_mm_per_pixel=`
// comment lines carry the metric calibration.
DepthImage load_depth_image(const std::string& path);
void write_depth_image(const DepthImage& img, const std::string& path);

// Mirror about the vertical axis. `mirror_map` must be an involutive
// permutation pairing left/right landmark indices; self-paired entries
// (nose tip etc.) map to themselves.
std::pair<DepthImage, Shape> hflip(const DepthImage& img, const Shape& shape,
                                   const std::vector<int>& mirror_map);

}  // namespace depthmark
