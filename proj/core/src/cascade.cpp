#include "depthmark/cascade.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>

#include "depthmark/error.hpp"
#include "depthmark/parallel.hpp"
#include "depthmark/rng.hpp"

namespace depthmark {

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

double mean_landmark_error_px(const Shape& a, const Shape& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a.points[i] - b.points[i]).norm();
    return sum / static_cast<double>(a.size());
}

}  // namespace

Shape place_init_shape(const Shape& unit, const FaceBox& box) {
    if (box.w <= 0 || box.h <= 0)
        throw InvalidArgument("place_init_shape: degenerate box");
    Shape out = unit;
    for (auto& p : out.points)
        p = Eigen::Vector2d(p.x() * box.w + box.cx(), p.y() * box.h + box.cy());
    return out;
}

Shape normalize_to_unit(const Shape& shape, const FaceBox& box) {
    if (box.w <= 0 || box.h <= 0)
        throw InvalidArgument("normalize_to_unit: degenerate box");
    Shape out = shape;
    for (auto& p : out.points)
        p = Eigen::Vector2d((p.x() - box.cx()) / box.w, (p.y() - box.cy()) / box.h);
    return out;
}

Shape mean_unit_shape(const std::vector<const TrainSample*>& samples,
                      const std::vector<int>& landmark_ids) {
    if (samples.empty()) throw InvalidArgument("mean_unit_shape: no samples");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(2 * landmark_ids.size());
    for (const TrainSample* s : samples)
        acc += normalize_to_unit(s->gt.select(landmark_ids), s->box).to_vector();
    Shape mean = Shape::from_vector(acc / static_cast<double>(samples.size()));
    Eigen::Vector2d c = mean.centroid();
    for (auto& p : mean.points) p -= c;
    return mean;
}

std::vector<FaceBox> make_jitters(const FaceBox& box, const TrainConfig& cfg,
                                  std::uint64_t seed) {
    if (cfg.jitter_scale_sigma < 0 || cfg.jitter_shift_sigma < 0 || cfg.jitter_count < 0)
        throw InvalidArgument("make_jitters: negative jitter parameters");
    Rng rng(seed);
    std::vector<FaceBox> out;
    out.reserve(cfg.jitter_count);
    for (int i = 0; i < cfg.jitter_count; ++i) {
        double s = rng.gaussian(1.0, cfg.jitter_scale_sigma);
        double dx = rng.gaussian(0.0, cfg.jitter_shift_sigma * box.w);
        double dy = rng.gaussian(0.0, cfg.jitter_shift_sigma * box.h);
        double w = box.w * s, h = box.h * s;
        out.push_back(FaceBox{box.cx() + dx - 0.5 * w, box.cy() + dy - 0.5 * h, w, h});
    }
    return out;
}

Eigen::MatrixXd train_stage(const Eigen::MatrixXd& X_hat, const Eigen::MatrixXd& Phi_hat,
                            double gamma) {
    if (X_hat.cols() != Phi_hat.cols())
        throw InvalidArgument("train_stage: sample counts differ between X and Phi");
    if (Phi_hat.cols() < 1) throw InvalidArgument("train_stage: no samples");
    if (gamma < 0) throw InvalidArgument("train_stage: gamma must be >= 0");

    Eigen::MatrixXd A = Phi_hat * Phi_hat.transpose();
    A.diagonal().array() += gamma;
    Eigen::MatrixXd Bt = Phi_hat * X_hat.transpose();  // m x 2L'

    if (gamma > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success)
            return llt.solve(Bt).transpose();
        // fall through to the pivoted factorization
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw NumericError("train_stage: factorization failed");
    Eigen::VectorXd d = ldlt.vectorD();
    double dmax = d.cwiseAbs().maxCoeff();
    if (dmax <= 0.0 || d.minCoeff() < dmax * 1e-10) {
        if (gamma == 0.0)
            throw NumericError(
                "train_stage: Phi Phi^T is rank-deficient; a positive gamma is required");
        throw NumericError("train_stage: regularized system is not positive definite");
    }
    return ldlt.solve(Bt).transpose();
}

CascadeTrainResult train_cascade(const std::vector<const TrainSample*>& samples,
                                 const std::vector<int>& landmark_ids,
                                 const FeatureSpec& features, const TrainConfig& cfg,
                                 int threads) {
    if (samples.size() < 2) throw InvalidArgument("train_cascade: need at least 2 samples");
    if (cfg.stages < 1) throw InvalidArgument("train_cascade: need at least 1 stage");
    if (landmark_ids.empty()) throw InvalidArgument("train_cascade: empty landmark set");
    const std::size_t num_lm = samples.front()->gt.size();
    for (const TrainSample* s : samples)
        if (s->gt.size() != num_lm)
            throw InvalidArgument("train_cascade: inconsistent landmark sets across samples");

    const int L = static_cast<int>(landmark_ids.size());
    const int m = feature_length(features, L);

    // Ground-truth shapes per sample and the per-sample ground-truth
    // feature vectors; their mean is the centering vector of every stage.
    std::vector<Shape> gt_sel(samples.size());
    Eigen::MatrixXd gt_feats(m, samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        gt_sel[i] = samples[i]->gt.select(landmark_ids);
        gt_feats.col(static_cast<Eigen::Index>(i)) =
            extract_features(samples[i]->image, gt_sel[i], features);
    });
    Eigen::VectorXd mean_gt_feature = gt_feats.rowwise().mean();

    Shape init = mean_unit_shape(samples, landmark_ids);

    // One training entry per (sample, start box): the detected box plus
    // jitter_count perturbed copies of it.
    struct Entry {
        std::size_t sample;
        Shape current;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::vector<FaceBox> boxes{samples[i]->box};
        auto jit = make_jitters(samples[i]->box, cfg, Rng::derive(cfg.seed, i));
        boxes.insert(boxes.end(), jit.begin(), jit.end());
        for (const FaceBox& b : boxes)
            entries.push_back(Entry{i, place_init_shape(init, b)});
    }
    const std::size_t ne = entries.size();

    CascadeTrainResult result;
    result.model.init_shape = init;
    result.model.landmark_ids = landmark_ids;
    result.model.features = features;

    auto mean_error = [&] {
        double sum = 0.0;
        for (const Entry& e : entries)
            sum += mean_landmark_error_px(e.current, gt_sel[e.sample]);
        return sum / static_cast<double>(ne);
    };
    result.stage_mean_error_px.push_back(mean_error());

    Eigen::MatrixXd Phi_hat(m, ne);
    Eigen::MatrixXd X_hat(2 * L, ne);
    for (int k = 0; k < cfg.stages; ++k) {
        parallel_for(ne, threads, [&](std::size_t i) {
            const Entry& e = entries[i];
            Phi_hat.col(static_cast<Eigen::Index>(i)) =
                extract_features(samples[e.sample]->image, e.current, features) -
                mean_gt_feature;
            X_hat.col(static_cast<Eigen::Index>(i)) =
                gt_sel[e.sample].to_vector() - e.current.to_vector();
        });
        double gamma_abs = cfg.gamma * Phi_hat.squaredNorm() / m;
        Eigen::MatrixXd R = train_stage(X_hat, Phi_hat, gamma_abs);
        for (std::size_t i = 0; i < ne; ++i) {
            Eigen::VectorXd upd = R * Phi_hat.col(static_cast<Eigen::Index>(i));
            Shape& cur = entries[i].current;
            for (int l = 0; l < L; ++l)
                cur.points[l] += Eigen::Vector2d(upd[2 * l], upd[2 * l + 1]);
        }
        result.model.stages.push_back(StageModel{std::move(R), mean_gt_feature, gamma_abs});
        result.stage_mean_error_px.push_back(mean_error());
    }
    return result;
}

Shape predict(const CascadeModel& model, const DepthImage& img, const FaceBox& box,
              PredictPhases* phases) {
    Shape x = place_init_shape(model.init_shape, box);
    const int L = static_cast<int>(x.size());
    for (const StageModel& stage : model.stages) {
        double t0 = phases ? now_s() : 0.0;
        Eigen::VectorXd phi = extract_features(img, x, model.features) - stage.mean_feature;
        double t1 = phases ? now_s() : 0.0;
        Eigen::VectorXd upd = stage.R * phi;
        for (int l = 0; l < L; ++l)
            x.points[l] += Eigen::Vector2d(upd[2 * l], upd[2 * l + 1]);
        if (phases) {
            double t2 = now_s();
            phases->feature_s += t1 - t0;
            phases->update_s += t2 - t1;
        }
    }
    return x;
}

}  // namespace depthmark
