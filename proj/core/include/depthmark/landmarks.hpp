#pragma once

#include <string>
#include <vector>

namespace depthmark {

// Canonical 22-landmark table shared by the synthetic generator, pose
// bins and reports: 8 mirrored left/right pairs plus 6 center points.
// "_l"/"_r" refer to the image-left/right side of a frontal face.
inline constexpr int kNumLandmarks = 22;

const std::vector<std::string>& landmark_names();
int landmark_id(const std::string& name);

// Involutive permutation pairing left/right landmarks for hflip.
const std::vector<int>& landmark_mirror_map();

// Landmarks visible from a profile view: the 6 center points plus the 8
// near-side points. `positive_yaw` selects the side that stays visible
// when the head turns toward positive yaw.
std::vector<int> profile_landmark_ids(bool positive_yaw);

std::vector<int> all_landmark_ids();

// Reporting groups (brow, eye, nose, mouth, cheek_jaw, chin).
struct LandmarkGroup {
    std::string name;
    std::vector<int> ids;
};
const std::vector<LandmarkGroup>& landmark_groups();

}  // namespace depthmark
