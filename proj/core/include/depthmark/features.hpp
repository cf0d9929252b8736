#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "depthmark/depth_image.hpp"

namespace depthmark {

// All extractors run on a hole-free image (normally the preprocess
// output), read pixels with replicate padding at the borders, and center
// each landmark patch at the nearest-integer landmark position. Feature
// layout is landmark-major: the descriptor of landmark i occupies one
// contiguous block.

struct HogConfig {
    int patch_side = 32;
    int cells_per_side = 4;
    int bins = 9;             // unsigned orientation bins over [0, pi)
    double epsilon = 1e-6;    // normalization floor
};

struct LbpConfig {
    int patch_side = 32;      // uniform LBP, 8 neighbors, radius 1 -> 59 bins
};

enum class FeatureKind : int { Hog = 0, Lbp = 1 };

struct FeatureSpec {
    FeatureKind kind = FeatureKind::Hog;
    HogConfig hog;
    LbpConfig lbp;
};

int hog_length(const HogConfig& cfg, int num_landmarks);
int lbp_length(int num_landmarks);
int feature_length(const FeatureSpec& spec, int num_landmarks);

Eigen::VectorXd extract_hog(const DepthImage& img, const Shape& shape, const HogConfig& cfg);
Eigen::VectorXd extract_lbp(const DepthImage& img, const Shape& shape, const LbpConfig& cfg);
Eigen::VectorXd extract_features(const DepthImage& img, const Shape& shape,
                                 const FeatureSpec& spec);

// Neighbor-minus-center values over a patch_side x patch_side patch,
// row-major, skipping the center pixel: p = patch_side^2 - 1 entries per
// landmark. patch_side must be odd.
std::vector<Eigen::VectorXd> extract_depth_diff(const DepthImage& img, const Shape& shape,
                                                int patch_side);

// code_j = 0.5 * (sgn((W^T d)_j) + 1) with sgn(0) = +1.
// W is p x B; the result has one 0/1 entry per bit.
std::vector<std::uint8_t> binarize(const Eigen::VectorXd& d, const Eigen::MatrixXd& W);

}  // namespace depthmark
