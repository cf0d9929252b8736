#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "depthmark/depth_image.hpp"
#include "depthmark/features.hpp"

namespace depthmark {

// One cascade stage: descent map R applied to features centered on the
// mean ground-truth feature vector.
struct StageModel {
    Eigen::MatrixXd R;             // 2L' x m
    Eigen::VectorXd mean_feature;  // m
    double gamma = 0.0;            // absolute ridge weight used for this stage
};

struct CascadeModel {
    std::vector<StageModel> stages;
    Shape init_shape;               // unit frame: zero centroid, box-normalized scale
    std::vector<int> landmark_ids;  // semantic ids into the dataset landmark table
    FeatureSpec features;
};

struct TrainConfig {
    int stages = 7;
    // Relative ridge weight; each stage uses gamma * trace(Phi Phi^T) / m.
    double gamma = 1e-3;
    int jitter_count = 10;
    double jitter_scale_sigma = 0.05;
    double jitter_shift_sigma = 0.05;
    std::uint64_t seed = 0;
};

// One training image: preprocessed depth grid, full ground-truth shape
// (the cascade selects its landmark subset), detected box and yaw label.
struct TrainSample {
    DepthImage image;
    Shape gt;
    FaceBox box;
    double yaw_deg = 0.0;
};

// Wall-clock accumulators for the three prediction phases.
struct PredictPhases {
    double selection_s = 0.0;
    double feature_s = 0.0;
    double update_s = 0.0;
};

// Scales the zero-centroid unit shape by the box dimensions and moves it
// to the box center.
Shape place_init_shape(const Shape& unit, const FaceBox& box);
// Inverse of place_init_shape for the same box.
Shape normalize_to_unit(const Shape& shape, const FaceBox& box);

// Mean of box-normalized ground-truth shapes, recentered to zero centroid.
Shape mean_unit_shape(const std::vector<const TrainSample*>& samples,
                      const std::vector<int>& landmark_ids);

// jitter_count boxes with scale ~ N(1, scale_sigma^2) and center shift
// ~ N(0, (shift_sigma * box dimension)^2), deterministic under seed.
std::vector<FaceBox> make_jitters(const FaceBox& box, const TrainConfig& cfg,
                                  std::uint64_t seed);

// Closed-form ridge descent map R = X_hat Phi_hat^T (Phi_hat Phi_hat^T
// + gamma I)^-1 via an SPD factorization. gamma = 0 requires Phi Phi^T to
// be full rank.
Eigen::MatrixXd train_stage(const Eigen::MatrixXd& X_hat, const Eigen::MatrixXd& Phi_hat,
                            double gamma);

struct CascadeTrainResult {
    CascadeModel model;
    // Mean per-landmark training error in pixels; entry 0 is the error of
    // the initial placement, entry k the error after stage k.
    std::vector<double> stage_mean_error_px;
};

CascadeTrainResult train_cascade(const std::vector<const TrainSample*>& samples,
                                 const std::vector<int>& landmark_ids,
                                 const FeatureSpec& features, const TrainConfig& cfg,
                                 int threads = 1);

Shape predict(const CascadeModel& model, const DepthImage& img, const FaceBox& box,
              PredictPhases* phases = nullptr);

}  // namespace depthmark
