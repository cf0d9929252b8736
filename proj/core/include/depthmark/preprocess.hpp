#pragma once

#include "depthmark/depth_image.hpp"

namespace depthmark {

struct PreprocessConfig {
    int median_window = 3;  // odd; 1 disables smoothing
};

// Converts a raw depth grid into the z-component of the unit surface
// normal at every pixel. Holes are filled by nearest-valid-neighbor
// (breadth-first), the filled grid is median-smoothed, and the normal is
// estimated from central differences using the image's pixel pitch
// (one-sided at borders). Every output pixel holds a value in [-1, 1];
// the validity mask of the result still marks which pixels were measured
// rather than filled, so downstream code can weight confidence.
DepthImage preprocess(const DepthImage& img, const PreprocessConfig& cfg = {});

}  // namespace depthmark
