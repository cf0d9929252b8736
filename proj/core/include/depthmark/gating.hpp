#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "depthmark/cascade.hpp"

namespace depthmark {

// Mean and floored per-coordinate variance of ground-truth features over
// one pose subset; the gating function measures a normalized Mahalanobis
// distance against these statistics.
struct GatingStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd var;  // every entry >= floor
    double floor = 1e-6;
};

// Yaw range plus the landmark subset annotated for that range. Ranges are
// closed and may overlap.
struct PoseBin {
    double yaw_min_deg = -90.0;
    double yaw_max_deg = 90.0;
    std::vector<int> landmark_ids;

    bool contains(double yaw_deg) const {
        return yaw_deg >= yaw_min_deg && yaw_deg <= yaw_max_deg;
    }
};

// Standard 1/3/5 descent-map layouts. The frontal bin (index 0) covers
// [-45, 45] with the full landmark set in every layout; the half-range
// bins use the full set and the profile bins the 14-landmark subsets.
std::vector<PoseBin> default_pose_bins(int dms);

// Assigns each sample to every bin containing its yaw. A sample matching
// no bin is an error naming the sample.
std::vector<std::vector<int>> partition_by_pose(const std::vector<double>& yaws_deg,
                                                const std::vector<PoseBin>& bins);

GatingStats fit_gate(const std::vector<Eigen::VectorXd>& gt_features, double floor = 1e-6);

// g = sqrt((1/m) sum_j (phi_j - mean_j)^2 / var_j)
double gating_distance(const GatingStats& stats, const Eigen::VectorXd& phi);

struct GatedSubset {
    CascadeModel cascade;
    GatingStats gate;
    PoseBin bin;
};

struct GatedModel {
    std::vector<GatedSubset> subsets;
};

// Index of the subset whose initial-shape features are closest to the
// subset's ground-truth feature statistics; ties break to the lowest
// index.
int gate_select(const GatedModel& model, const DepthImage& img, const FaceBox& box,
                PredictPhases* phases = nullptr);

// Select once, then run all K stages of the selected cascade.
std::pair<Shape, int> gated_predict(const GatedModel& model, const DepthImage& img,
                                    const FaceBox& box, PredictPhases* phases = nullptr);

// Correct when the selected subset's yaw range contains the true yaw;
// left/right profile confusions never do.
bool selection_correct(const GatedModel& model, int selected, double true_yaw_deg);

struct GatedTrainResult {
    GatedModel model;
    std::vector<std::vector<double>> stage_mean_error_px;  // per subset
};

GatedTrainResult train_gated(const std::vector<const TrainSample*>& samples,
                             const std::vector<PoseBin>& bins, const FeatureSpec& features,
                             const TrainConfig& cfg, int threads = 1);

}  // namespace depthmark
