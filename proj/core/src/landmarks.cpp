#include "depthmark/landmarks.hpp"

#include <algorithm>

#include "depthmark/error.hpp"

namespace depthmark {

const std::vector<std::string>& landmark_names() {
    static const std::vector<std::string> names = {
        "brow_outer_l", "brow_inner_l", "brow_inner_r", "brow_outer_r",
        "eye_outer_l",  "eye_inner_l",  "eye_inner_r",  "eye_outer_r",
        "nose_bridge",  "nose_tip",     "nose_corner_l", "nose_corner_r",
        "nose_base",    "cheek_l",      "cheek_r",
        "mouth_corner_l", "lip_upper",  "lip_lower",    "mouth_corner_r",
        "jaw_l",        "jaw_r",        "chin",
    };
    return names;
}

int landmark_id(const std::string& name) {
    const auto& names = landmark_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidArgument("unknown landmark name: " + name);
    return static_cast<int>(it - names.begin());
}

const std::vector<int>& landmark_mirror_map() {
    static const std::vector<int> map = {
        3, 2, 1, 0,      // brows
        7, 6, 5, 4,      // eyes
        8, 9, 11, 10,    // nose bridge/tip fixed, corners swap
        12, 14, 13,      // nose base fixed, cheeks swap
        18, 16, 17, 15,  // mouth corners swap, lips fixed
        20, 19, 21,      // jaws swap, chin fixed
    };
    return map;
}

std::vector<int> profile_landmark_ids(bool positive_yaw) {
    // Positive yaw turns the face so the "_r" side rotates away.
    static const std::vector<int> left = {0, 1, 4, 5, 10, 13, 15, 19};
    static const std::vector<int> right = {3, 2, 7, 6, 11, 14, 18, 20};
    static const std::vector<int> center = {8, 9, 12, 16, 17, 21};
    std::vector<int> ids = positive_yaw ? left : right;
    ids.insert(ids.end(), center.begin(), center.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<int> all_landmark_ids() {
    std::vector<int> ids(kNumLandmarks);
    for (int i = 0; i < kNumLandmarks; ++i) ids[i] = i;
    return ids;
}

const std::vector<LandmarkGroup>& landmark_groups() {
    static const std::vector<LandmarkGroup> groups = {
        {"brow", {0, 1, 2, 3}},
        {"eye", {4, 5, 6, 7}},
        {"nose", {8, 9, 10, 11, 12}},
        {"mouth", {15, 16, 17, 18}},
        {"cheek_jaw", {13, 14, 19, 20}},
        {"chin", {21}},
    };
    return groups;
}

}  // namespace depthmark
