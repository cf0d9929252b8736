#include "depthmark/gating.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "depthmark/error.hpp"
#include "depthmark/landmarks.hpp"
#include "depthmark/parallel.hpp"

namespace depthmark {

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

std::vector<PoseBin> default_pose_bins(int dms) {
    const auto all = all_landmark_ids();
    switch (dms) {
        case 1:
            return {PoseBin{-45, 45, all}};
        case 3:
            return {PoseBin{-45, 45, all}, PoseBin{0, 45, all}, PoseBin{-45, 0, all}};
        case 5:
            return {PoseBin{-45, 45, all},
                    PoseBin{0, 45, all},
                    PoseBin{-45, 0, all},
                    PoseBin{45, 90, profile_landmark_ids(true)},
                    PoseBin{-90, -45, profile_landmark_ids(false)}};
        default:
            throw InvalidArgument("default_pose_bins: dms must be 1, 3 or 5");
    }
}

std::vector<std::vector<int>> partition_by_pose(const std::vector<double>& yaws_deg,
                                                const std::vector<PoseBin>& bins) {
    if (bins.empty()) throw InvalidArgument("partition_by_pose: no bins");
    std::vector<std::vector<int>> subsets(bins.size());
    for (std::size_t i = 0; i < yaws_deg.size(); ++i) {
        bool hit = false;
        for (std::size_t z = 0; z < bins.size(); ++z)
            if (bins[z].contains(yaws_deg[i])) {
                subsets[z].push_back(static_cast<int>(i));
                hit = true;
            }
        if (!hit)
            throw InvalidArgument("partition_by_pose: sample " + std::to_string(i) +
                                  " (yaw " + std::to_string(yaws_deg[i]) +
                                  ") falls in no bin");
    }
    return subsets;
}

GatingStats fit_gate(const std::vector<Eigen::VectorXd>& gt_features, double floor) {
    if (gt_features.size() < 2)
        throw InvalidArgument("fit_gate: need at least 2 samples");
    if (floor <= 0) throw InvalidArgument("fit_gate: floor must be positive");

    const Eigen::Index m = gt_features.front().size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
    for (const auto& f : gt_features) {
        if (f.size() != m) throw InvalidArgument("fit_gate: inconsistent feature lengths");
        mean += f;
    }
    mean /= static_cast<double>(gt_features.size());

    Eigen::VectorXd var = Eigen::VectorXd::Zero(m);
    for (const auto& f : gt_features) var += (f - mean).cwiseAbs2();
    var /= static_cast<double>(gt_features.size());
    var = var.cwiseMax(floor);
    return GatingStats{std::move(mean), std::move(var), floor};
}

double gating_distance(const GatingStats& stats, const Eigen::VectorXd& phi) {
    if (phi.size() != stats.mean.size())
        throw InvalidArgument("gating_distance: feature length mismatch");
    double acc = ((phi - stats.mean).cwiseAbs2().cwiseQuotient(stats.var)).sum();
    return std::sqrt(acc / static_cast<double>(stats.mean.size()));
}

int gate_select(const GatedModel& model, const DepthImage& img, const FaceBox& box,
                PredictPhases* phases) {
    if (model.subsets.empty()) throw InvalidArgument("gate_select: empty model");
    double t0 = phases ? now_s() : 0.0;
    int best = 0;
    double best_g = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < model.subsets.size(); ++z) {
        const GatedSubset& sub = model.subsets[z];
        Shape placed = place_init_shape(sub.cascade.init_shape, box);
        Eigen::VectorXd phi = extract_features(img, placed, sub.cascade.features);
        double g = gating_distance(sub.gate, phi);
        if (g < best_g) {
            best_g = g;
            best = static_cast<int>(z);
        }
    }
    if (phases) phases->selection_s += now_s() - t0;
    return best;
}

std::pair<Shape, int> gated_predict(const GatedModel& model, const DepthImage& img,
                                    const FaceBox& box, PredictPhases* phases) {
    int z = gate_select(model, img, box, phases);
    Shape shape = predict(model.subsets[z].cascade, img, box, phases);
    return {std::move(shape), z};
}

bool selection_correct(const GatedModel& model, int selected, double true_yaw_deg) {
    if (selected < 0 || static_cast<std::size_t>(selected) >= model.subsets.size())
        return false;
    return model.subsets[selected].bin.contains(true_yaw_deg);
}

GatedTrainResult train_gated(const std::vector<const TrainSample*>& samples,
                             const std::vector<PoseBin>& bins, const FeatureSpec& features,
                             const TrainConfig& cfg, int threads) {
    std::vector<double> yaws(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) yaws[i] = samples[i]->yaw_deg;
    auto subsets = partition_by_pose(yaws, bins);

    GatedTrainResult result;
    for (std::size_t z = 0; z < bins.size(); ++z) {
        if (subsets[z].size() < 2)
            throw InvalidArgument("train_gated: bin " + std::to_string(z) +
                                  " has fewer than 2 samples");
        std::vector<const TrainSample*> sub;
        sub.reserve(subsets[z].size());
        for (int idx : subsets[z]) sub.push_back(samples[idx]);

        TrainConfig sub_cfg = cfg;
        sub_cfg.seed = Rng::derive(cfg.seed, z);
        auto trained = train_cascade(sub, bins[z].landmark_ids, features, sub_cfg, threads);

        // Gate statistics from the same ground-truth features the cascade
        // centers on.
        std::vector<Eigen::VectorXd> gt_feats(sub.size());
        parallel_for(sub.size(), threads, [&](std::size_t i) {
            gt_feats[i] = extract_features(
                sub[i]->image, sub[i]->gt.select(bins[z].landmark_ids), features);
        });
        GatingStats gate = fit_gate(gt_feats);

        result.model.subsets.push_back(
            GatedSubset{std::move(trained.model), std::move(gate), bins[z]});
        result.stage_mean_error_px.push_back(std::move(trained.stage_mean_error_px));
    }
    return result;
}

}  // namespace depthmark
