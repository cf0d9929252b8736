#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "depthmark/cascade.hpp"
#include "depthmark/gating.hpp"

namespace depthmark {

// One SMUF stage: hash projection W (shared across landmarks) and the
// descent map R over the concatenated per-landmark binary codes.
struct SmufStage {
    Eigen::MatrixXd W;  // p x B
    Eigen::MatrixXd R;  // 2L' x (B * L')
    double lambda = 1.0;
    double gamma = 0.0;  // absolute value used for this stage
};

struct SmufModel {
    std::vector<SmufStage> stages;
    Shape init_shape;
    std::vector<int> landmark_ids;
    int patch_side = 15;
    int bits = 64;
};

struct SmufTrainConfig {
    int stages = 7;
    int bits = 64;
    int patch_side = 15;  // p = patch_side^2 - 1 depth differences per landmark
    double lambda = 1.0;
    // Relative ridge weight, scaled by trace(Psi Psi^T) / (B * L') per stage.
    double gamma = 1e-3;
    int alternations = 4;
    int jitter_count = 10;
    double jitter_scale_sigma = 0.05;
    double jitter_shift_sigma = 0.05;
    std::uint64_t seed = 0;
};

// Centered training matrices for one stage. Columns of D_hat and Phi run
// landmark-major within each sample: column n * L' + l holds landmark l
// of entry n. X_hat holds one shape-delta column per entry.
struct SmufTrainState {
    Eigen::MatrixXd D_hat;  // p x (L' * N)
    Eigen::MatrixXd Phi;    // B x (L' * N), entries in {0, 1}
    Eigen::MatrixXd X_hat;  // 2L' x N
    int num_landmarks = 0;
};

// Rearranges per-landmark columns into stacked per-entry columns:
// out(row + l * rows, n) = in(row, n * L' + l).
Eigen::MatrixXd stack_codes(const Eigen::MatrixXd& per_landmark, int num_landmarks);

// Binary codes 0.5 * (sgn(W^T D) + 1) with sgn(0) = +1.
Eigen::MatrixXd compute_codes(const Eigen::MatrixXd& W, const Eigen::MatrixXd& D);

struct SmufObjective {
    double total = 0;       // C = C1 + lambda * C2
    double fit = 0;         // C1: ||X - R Psi||^2 + gamma ||R||^2
    double quantization = 0;  // C2: ||R (Phi - 0.5 - W^T D)||^2 (stacked)
};
SmufObjective smuf_objective(const SmufTrainState& state, const Eigen::MatrixXd& W,
                             const Eigen::MatrixXd& R, double gamma, double lambda);

// Closed-form minimizer of the objective in R at fixed W and codes.
Eigen::MatrixXd update_R(const SmufTrainState& state, const Eigen::MatrixXd& W,
                         double gamma, double lambda);

// W = [(R^+ X + lambda (Phi - 0.5)) D^T]^T / (1 + gamma + lambda), with
// R^+ the Moore-Penrose pseudoinverse and R^+ X unstacked to per-landmark
// columns before the product.
Eigen::MatrixXd update_W(const SmufTrainState& state, const Eigen::MatrixXd& R,
                         double gamma, double lambda);

// Random orthonormal initialization, then `alternations` rounds of
// {recompute codes; update_R; update_W}. On return state.Phi holds the
// codes the returned R was solved against. `trace`, when given, records
// the objective after each alternation's update_R.
SmufStage train_smuf_stage(SmufTrainState& state, const SmufTrainConfig& cfg,
                           std::uint64_t seed,
                           std::vector<SmufObjective>* trace = nullptr);

struct SmufTrainResult {
    SmufModel model;
    std::vector<double> stage_mean_error_px;  // entry 0 = initial placement
};

SmufTrainResult train_smuf(const std::vector<const TrainSample*>& samples,
                           const std::vector<int>& landmark_ids, const SmufTrainConfig& cfg,
                           int threads = 1);

// Stage updates gather columns of R where code bits are set; no dense
// multiply on the prediction path.
Shape smuf_predict(const SmufModel& model, const DepthImage& img, const FaceBox& box,
                   PredictPhases* phases = nullptr);

// Concatenated per-landmark codes at a shape (test-time convention: raw,
// uncentered depth differences).
Eigen::VectorXd smuf_code_vector(const SmufModel& model, const SmufStage& stage,
                                 const DepthImage& img, const Shape& shape);

struct GatedSmufSubset {
    SmufModel model;
    GatingStats gate;
    PoseBin bin;
};

struct GatedSmufModel {
    std::vector<GatedSmufSubset> subsets;
};

int smuf_gate_select(const GatedSmufModel& model, const DepthImage& img, const FaceBox& box,
                     PredictPhases* phases = nullptr);
std::pair<Shape, int> gated_smuf_predict(const GatedSmufModel& model, const DepthImage& img,
                                         const FaceBox& box, PredictPhases* phases = nullptr);
bool selection_correct(const GatedSmufModel& model, int selected, double true_yaw_deg);

struct GatedSmufTrainResult {
    GatedSmufModel model;
    std::vector<std::vector<double>> stage_mean_error_px;
};
GatedSmufTrainResult train_gated_smuf(const std::vector<const TrainSample*>& samples,
                                      const std::vector<PoseBin>& bins,
                                      const SmufTrainConfig& cfg, int threads = 1);

}  // namespace depthmark
