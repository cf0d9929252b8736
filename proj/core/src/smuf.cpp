#include "depthmark/smuf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <limits>

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

// p x L' block of depth differences for every landmark of one shape.
Eigen::MatrixXd diff_block(const DepthImage& img, const Shape& shape, int patch_side) {
    auto diffs = extract_depth_diff(img, shape, patch_side);
    Eigen::MatrixXd out(diffs.front().size(), diffs.size());
    for (std::size_t l = 0; l < diffs.size(); ++l)
        out.col(static_cast<Eigen::Index>(l)) = diffs[l];
    return out;
}

double mean_landmark_error_px(const Shape& a, const Shape& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a.points[i] - b.points[i]).norm();
    return sum / static_cast<double>(a.size());
}

}  // namespace

Eigen::MatrixXd stack_codes(const Eigen::MatrixXd& per_landmark, int num_landmarks) {
    const Eigen::Index rows = per_landmark.rows();
    if (num_landmarks < 1 || per_landmark.cols() % num_landmarks != 0)
        throw InvalidArgument("stack_codes: column count is not a multiple of L'");
    const Eigen::Index n = per_landmark.cols() / num_landmarks;
    Eigen::MatrixXd out(rows * num_landmarks, n);
    for (Eigen::Index e = 0; e < n; ++e)
        for (int l = 0; l < num_landmarks; ++l)
            out.col(e).segment(l * rows, rows) = per_landmark.col(e * num_landmarks + l);
    return out;
}

Eigen::MatrixXd compute_codes(const Eigen::MatrixXd& W, const Eigen::MatrixXd& D) {
    if (W.rows() != D.rows())
        throw InvalidArgument("compute_codes: projection/input dimension mismatch");
    Eigen::MatrixXd proj = W.transpose() * D;
    return (proj.array() >= 0.0).cast<double>();  // sgn(0) = +1
}

SmufObjective smuf_objective(const SmufTrainState& state, const Eigen::MatrixXd& W,
                             const Eigen::MatrixXd& R, double gamma, double lambda) {
    const int L = state.num_landmarks;
    if (state.Phi.cols() != state.D_hat.cols() ||
        state.Phi.cols() != state.X_hat.cols() * L)
        throw InvalidArgument("smuf_objective: inconsistent state dimensions");
    Eigen::MatrixXd Psi = stack_codes(state.Phi, L);
    if (R.cols() != Psi.rows() || R.rows() != state.X_hat.rows())
        throw InvalidArgument("smuf_objective: descent map dimension mismatch");

    SmufObjective obj;
    obj.fit = (state.X_hat - R * Psi).squaredNorm() + gamma * R.squaredNorm();
    Eigen::MatrixXd Q = stack_codes(
        (state.Phi.array() - 0.5).matrix() - W.transpose() * state.D_hat, L);
    obj.quantization = (R * Q).squaredNorm();
    obj.total = obj.fit + lambda * obj.quantization;
    return obj;
}

Eigen::MatrixXd update_R(const SmufTrainState& state, const Eigen::MatrixXd& W,
                         double gamma, double lambda) {
    if (gamma < 0 || lambda < 0)
        throw InvalidArgument("update_R: gamma and lambda must be >= 0");
    const int L = state.num_landmarks;
    Eigen::MatrixXd Psi = stack_codes(state.Phi, L);
    Eigen::MatrixXd Q = stack_codes(
        (state.Phi.array() - 0.5).matrix() - W.transpose() * state.D_hat, L);

    Eigen::MatrixXd A = Psi * Psi.transpose();
    if (lambda > 0) A.noalias() += lambda * Q * Q.transpose();
    A.diagonal().array() += gamma;
    Eigen::MatrixXd Bt = Psi * state.X_hat.transpose();

    if (gamma > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success)
            return llt.solve(Bt).transpose();
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw NumericError("update_R: factorization failed");
    Eigen::VectorXd d = ldlt.vectorD();
    double dmax = d.cwiseAbs().maxCoeff();
    if (dmax <= 0.0 || d.minCoeff() < dmax * 1e-10)
        throw NumericError("update_R: system is not positive definite; gamma > 0 required");
    return ldlt.solve(Bt).transpose();
}

Eigen::MatrixXd update_W(const SmufTrainState& state, const Eigen::MatrixXd& R,
                         double gamma, double lambda) {
    const int L = state.num_landmarks;
    const Eigen::Index B = state.Phi.rows();
    if (R.cols() != B * L || R.rows() != state.X_hat.rows())
        throw InvalidArgument("update_W: descent map dimension mismatch");

    // Minimum-norm least-squares solve realizes the pseudoinverse action
    // R^+ X without materializing R^+.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(R);
    Eigen::MatrixXd Y = cod.solve(state.X_hat);  // (B*L') x N
    double resid = (R * Y - state.X_hat).norm();
    if (resid > 1e-6 * std::max(1.0, state.X_hat.norm()))
        throw NumericError("update_W: R is rank-deficient (residual " +
                           std::to_string(resid) + ")");

    // Unstack back to per-landmark columns.
    Eigen::MatrixXd Yl(B, state.Phi.cols());
    const Eigen::Index n = state.X_hat.cols();
    for (Eigen::Index e = 0; e < n; ++e)
        for (int l = 0; l < L; ++l)
            Yl.col(e * L + l) = Y.col(e).segment(l * B, B);

    Eigen::MatrixXd numerator =
        (Yl + lambda * (state.Phi.array() - 0.5).matrix()) * state.D_hat.transpose();
    return numerator.transpose() / (1.0 + gamma + lambda);  // p x B
}

SmufStage train_smuf_stage(SmufTrainState& state, const SmufTrainConfig& cfg,
                           std::uint64_t seed, std::vector<SmufObjective>* trace) {
    const Eigen::Index p = state.D_hat.rows();
    const int B = cfg.bits;
    if (B < 1 || p < B)
        throw InvalidArgument("train_smuf_stage: need 1 <= bits <= patch size p");
    if (cfg.gamma <= 0)
        throw InvalidArgument("train_smuf_stage: gamma must be positive");

    // Random orthonormal columns via QR of a seeded Gaussian matrix.
    Rng rng(seed);
    Eigen::MatrixXd G(p, B);
    for (Eigen::Index j = 0; j < B; ++j)
        for (Eigen::Index i = 0; i < p; ++i) G(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd W = qr.householderQ() * Eigen::MatrixXd::Identity(p, B);

    state.Phi = compute_codes(W, state.D_hat);
    // Absolute ridge weight fixed from the initial codes so the objective
    // stays the same function across alternations.
    double gamma_abs =
        cfg.gamma * state.Phi.squaredNorm() / (static_cast<double>(B) * state.num_landmarks);
    if (gamma_abs <= 0) gamma_abs = cfg.gamma;

    Eigen::MatrixXd R;
    for (int it = 0; it < cfg.alternations; ++it) {
        state.Phi = compute_codes(W, state.D_hat);
        R = update_R(state, W, gamma_abs, cfg.lambda);
        if (trace) trace->push_back(smuf_objective(state, W, R, gamma_abs, cfg.lambda));
        W = update_W(state, R, gamma_abs, cfg.lambda);
    }
    return SmufStage{std::move(W), std::move(R), cfg.lambda, gamma_abs};
}

SmufTrainResult train_smuf(const std::vector<const TrainSample*>& samples,
                           const std::vector<int>& landmark_ids, const SmufTrainConfig& cfg,
                           int threads) {
    if (samples.size() < 2) throw InvalidArgument("train_smuf: need at least 2 samples");
    if (cfg.stages < 1) throw InvalidArgument("train_smuf: need at least 1 stage");
    const int L = static_cast<int>(landmark_ids.size());
    const int p = cfg.patch_side * cfg.patch_side - 1;

    std::vector<Shape> gt_sel(samples.size());
    std::vector<Eigen::MatrixXd> gt_diffs(samples.size());  // p x L' each
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        gt_sel[i] = samples[i]->gt.select(landmark_ids);
        gt_diffs[i] = diff_block(samples[i]->image, gt_sel[i], cfg.patch_side);
    });

    TrainConfig jitter_cfg;
    jitter_cfg.jitter_count = cfg.jitter_count;
    jitter_cfg.jitter_scale_sigma = cfg.jitter_scale_sigma;
    jitter_cfg.jitter_shift_sigma = cfg.jitter_shift_sigma;

    std::vector<const TrainSample*> sample_ptrs(samples.begin(), samples.end());
    Shape init = mean_unit_shape(sample_ptrs, landmark_ids);

    struct Entry {
        std::size_t sample;
        Shape current;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::vector<FaceBox> boxes{samples[i]->box};
        auto jit = make_jitters(samples[i]->box, jitter_cfg, Rng::derive(cfg.seed, i));
        boxes.insert(boxes.end(), jit.begin(), jit.end());
        for (const FaceBox& b : boxes)
            entries.push_back(Entry{i, place_init_shape(init, b)});
    }
    const std::size_t ne = entries.size();

    SmufTrainResult result;
    result.model.init_shape = init;
    result.model.landmark_ids = landmark_ids;
    result.model.patch_side = cfg.patch_side;
    result.model.bits = cfg.bits;

    auto mean_error = [&] {
        double sum = 0.0;
        for (const Entry& e : entries)
            sum += mean_landmark_error_px(e.current, gt_sel[e.sample]);
        return sum / static_cast<double>(ne);
    };
    result.stage_mean_error_px.push_back(mean_error());

    for (int k = 0; k < cfg.stages; ++k) {
        SmufTrainState state;
        state.num_landmarks = L;
        state.D_hat.resize(p, static_cast<Eigen::Index>(ne) * L);
        state.X_hat.resize(2 * L, static_cast<Eigen::Index>(ne));
        parallel_for(ne, threads, [&](std::size_t i) {
            const Entry& e = entries[i];
            Eigen::MatrixXd cur = diff_block(samples[e.sample]->image, e.current,
                                             cfg.patch_side);
            state.D_hat.middleCols(static_cast<Eigen::Index>(i) * L, L) =
                cur - gt_diffs[e.sample];
            state.X_hat.col(static_cast<Eigen::Index>(i)) =
                gt_sel[e.sample].to_vector() - e.current.to_vector();
        });

        SmufStage stage = train_smuf_stage(state, cfg, Rng::derive(cfg.seed, 1000 + k));

        // Shape update with the codes the stage's R was solved against.
        Eigen::MatrixXd Psi = stack_codes(state.Phi, L);
        for (std::size_t i = 0; i < ne; ++i) {
            Eigen::VectorXd upd = stage.R * Psi.col(static_cast<Eigen::Index>(i));
            Shape& cur = entries[i].current;
            for (int l = 0; l < L; ++l)
                cur.points[l] += Eigen::Vector2d(upd[2 * l], upd[2 * l + 1]);
        }
        result.model.stages.push_back(std::move(stage));
        result.stage_mean_error_px.push_back(mean_error());
    }
    return result;
}

Eigen::VectorXd smuf_code_vector(const SmufModel& model, const SmufStage& stage,
                                 const DepthImage& img, const Shape& shape) {
    const int B = model.bits;
    Eigen::VectorXd code(static_cast<Eigen::Index>(B) * shape.size());
    auto diffs = extract_depth_diff(img, shape, model.patch_side);
    for (std::size_t l = 0; l < diffs.size(); ++l) {
        auto bits = binarize(diffs[l], stage.W);
        for (int b = 0; b < B; ++b)
            code[static_cast<Eigen::Index>(l) * B + b] = bits[b];
    }
    return code;
}

Shape smuf_predict(const SmufModel& model, const DepthImage& img, const FaceBox& box,
                   PredictPhases* phases) {
    Shape x = place_init_shape(model.init_shape, box);
    const int L = static_cast<int>(x.size());
    const int B = model.bits;
    for (const SmufStage& stage : model.stages) {
        double t0 = phases ? now_s() : 0.0;
        auto diffs = extract_depth_diff(img, x, model.patch_side);
        std::vector<std::vector<std::uint8_t>> codes(diffs.size());
        for (std::size_t l = 0; l < diffs.size(); ++l)
            codes[l] = binarize(diffs[l], stage.W);
        double t1 = phases ? now_s() : 0.0;

        // Bit gather: the update is the sum of R columns at set bits.
        Eigen::VectorXd upd = Eigen::VectorXd::Zero(2 * L);
        for (int l = 0; l < L; ++l)
            for (int b = 0; b < B; ++b)
                if (codes[l][b]) upd += stage.R.col(static_cast<Eigen::Index>(l) * B + b);
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

int smuf_gate_select(const GatedSmufModel& model, const DepthImage& img, const FaceBox& box,
                     PredictPhases* phases) {
    if (model.subsets.empty()) throw InvalidArgument("smuf_gate_select: empty model");
    double t0 = phases ? now_s() : 0.0;
    int best = 0;
    double best_g = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < model.subsets.size(); ++z) {
        const GatedSmufSubset& sub = model.subsets[z];
        Shape placed = place_init_shape(sub.model.init_shape, box);
        Eigen::VectorXd code =
            smuf_code_vector(sub.model, sub.model.stages.front(), img, placed);
        double g = gating_distance(sub.gate, code);
        if (g < best_g) {
            best_g = g;
            best = static_cast<int>(z);
        }
    }
    if (phases) phases->selection_s += now_s() - t0;
    return best;
}

std::pair<Shape, int> gated_smuf_predict(const GatedSmufModel& model, const DepthImage& img,
                                         const FaceBox& box, PredictPhases* phases) {
    int z = smuf_gate_select(model, img, box, phases);
    Shape shape = smuf_predict(model.subsets[z].model, img, box, phases);
    return {std::move(shape), z};
}

bool selection_correct(const GatedSmufModel& model, int selected, double true_yaw_deg) {
    if (selected < 0 || static_cast<std::size_t>(selected) >= model.subsets.size())
        return false;
    return model.subsets[selected].bin.contains(true_yaw_deg);
}

GatedSmufTrainResult train_gated_smuf(const std::vector<const TrainSample*>& samples,
                                      const std::vector<PoseBin>& bins,
                                      const SmufTrainConfig& cfg, int threads) {
    std::vector<double> yaws(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) yaws[i] = samples[i]->yaw_deg;
    auto subsets = partition_by_pose(yaws, bins);

    GatedSmufTrainResult result;
    for (std::size_t z = 0; z < bins.size(); ++z) {
        if (subsets[z].size() < 2)
            throw InvalidArgument("train_gated_smuf: bin " + std::to_string(z) +
                                  " has fewer than 2 samples");
        std::vector<const TrainSample*> sub;
        sub.reserve(subsets[z].size());
        for (int idx : subsets[z]) sub.push_back(samples[idx]);

        SmufTrainConfig sub_cfg = cfg;
        sub_cfg.seed = Rng::derive(cfg.seed, z);
        auto trained = train_smuf(sub, bins[z].landmark_ids, sub_cfg, threads);

        // Gate over stage-1 codes of the ground-truth locations.
        std::vector<Eigen::VectorXd> gt_codes(sub.size());
        parallel_for(sub.size(), threads, [&](std::size_t i) {
            gt_codes[i] = smuf_code_vector(trained.model, trained.model.stages.front(),
                                           sub[i]->image,
                                           sub[i]->gt.select(bins[z].landmark_ids));
        });
        GatingStats gate = fit_gate(gt_codes);

        result.model.subsets.push_back(
            GatedSmufSubset{std::move(trained.model), std::move(gate), bins[z]});
        result.stage_mean_error_px.push_back(std::move(trained.stage_mean_error_px));
    }
    return result;
}

}  // namespace depthmark
