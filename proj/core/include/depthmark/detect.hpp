#pragma once

#include <cstdint>
#include <vector>

#include "depthmark/depth_image.hpp"

namespace depthmark {

struct DetectConfig {
    int clusters = 3;
    int max_iterations = 100;
    double min_component_frac = 0.01;  // of valid pixels; rejects speckle
    std::uint64_t seed = 0xD37EC7;     // k-means++ seeding
};

struct FaceDetection {
    FaceBox box;
    bool fallback = false;  // fewer than `clusters` distinct depths
};

// Clustering face detector: k-means (k-means++ init, seeded) over the
// valid depth values, pick the cluster with the lowest mean depth, drop
// connected components below the area threshold, return the tight
// bounding box of what remains. Images with fewer distinct depth values
// than clusters fall back to the bounding box of all valid pixels.
FaceDetection detect_face(const DepthImage& img, const DetectConfig& cfg = {});

// 1-D Lloyd iteration used by the detector; exposed for direct testing.
// Returns cluster centers (size k) and per-value assignment.
std::pair<std::vector<double>, std::vector<int>> kmeans_1d(
    const std::vector<double>& values, int k, std::uint64_t seed, int max_iterations);

}  // namespace depthmark
