#pragma once

#include <string>
#include <vector>

#include "depthmark/depth_image.hpp"

namespace depthmark {

// Landmark ground truth travelling next to each depth image. Text format,
// one record per landmark:
//
//   pose_yaw_deg=12.5
//   subset=train
//   0 brow_outer_l 34.25 51.00 1
//   ...
struct Annotation {
    Shape shape;
    std::vector<std::string> names;
    double yaw_deg = 0.0;
    std::string subset;
};

Annotation load_annotation(const std::string& path);
void write_annotation(const Annotation& a, const std::string& path);

}  // namespace depthmark
