#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stunmix/config.hpp"
#include "stunmix/data_model.hpp"
#include "stunmix/metrics.hpp"
#include "stunmix/params.hpp"
#include "stunmix/spatial_split.hpp"
#include "stunmix/unmixer.hpp"

namespace stunmix {

/// Xavier-uniform weights, zero biases, forget-gate bias 1, zero feature-regression diagonal.
UnmixerParams init_params(std::uint64_t seed, const ModelConfig& config);

/// 0.5 * lr0 * (1 + cos(pi * epoch / total_epochs)) for 0 <= epoch < total_epochs.
double cosine_lr(int epoch, int total_epochs, double lr0);

struct AdamState {
    std::vector<Matrix> m;  // first moments, in named_tensors order
    std::vector<Matrix> v;  // second moments
    std::int64_t step = 0;

    static AdamState zeros_like(const UnmixerParams& params);
};

/// One bias-corrected Adam update; re-zeroes the feature-regression diagonals.
/// Throws NonFinite naming the first parameter with a non-finite gradient.
void adam_step(UnmixerParams& params, const UnmixerParams& grads, AdamState& state, double lr, double beta1,
               double beta2, double eps);

struct HistoryRow {
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    std::optional<double> test_mae, test_rmse, test_rrmse, test_cc, test_f1;
};

std::string format_history_csv(std::span<const HistoryRow> rows);

/// Everything needed to continue training bit-exactly.
struct TrainState {
    UnmixerParams params;
    NormStats norm;
    AdamState adam;
    int epochs_done = 0;
    std::vector<HistoryRow> history;
};

struct TrainOptions {
    int threads = 1;
    /// Stop once this many epochs are complete (the schedule still spans TrainConfig::epochs).
    std::optional<int> stop_after_epochs;
    bool evaluate_test = true;
    std::function<void(const HistoryRow&)> on_epoch;
};

/// Fits normalization on the training ids, initializes from the seed (or from
/// `warm_start` when given) and runs the Adam / cosine schedule.
TrainState train(const Dataset& dataset, const DataSplit& split, const ModelConfig& model,
                 const TrainConfig& config, const TrainOptions& options = {},
                 const UnmixerParams* warm_start = nullptr);

/// Continues a run from a saved state with the same dataset, split and config.
TrainState resume_training(const Dataset& dataset, const DataSplit& split, const TrainConfig& config,
                           TrainState state, const TrainOptions& options = {});

/// Per-sample squared-error + weighted auxiliary loss, averaged over `ids` of an
/// already-normalized dataset.
double dataset_loss(const Dataset& normalized, std::span<const std::size_t> ids, const UnmixerParams& params,
                    int threads = 1);

struct Evaluation {
    metrics::ClassMetricReport report;
    Matrix refs;   // K x N_test
    Matrix preds;  // K x N_test
};

/// Normalizes `dataset` with the model's statistics and scores the test ids.
Evaluation evaluate(const UnmixerParams& params, const NormStats& norm, const Dataset& dataset,
                    const DataSplit& split, int threads = 1);
Evaluation evaluate_predictions(const Dataset& dataset, std::span<const std::size_t> test_ids, const Matrix& preds);

/// Constant predictor: the mean training abundance for every test sample.
Matrix mean_abundance_predictions(const Dataset& dataset, const DataSplit& split);

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_param;
    Eigen::Index worst_index = 0;
    std::size_t checked = 0;
};

struct GradCheckOptions {
    double eps = 1e-5;
    int threads = 1;
    /// Test hook: perturbs the analytic gradient to prove the check can fail.
    bool corrupt_backward = false;
    std::optional<LossWeights> weights;
};

/// Central differences against the analytic gradient for every free scalar
/// (feature-regression diagonals are constrained to zero and skipped).
/// Relative error = |a - n| / max(|a|, |n|, 1e-12).
GradCheckResult grad_check(const UnmixerParams& params, std::span<const Sample* const> samples,
                           const GradCheckOptions& options = {});
GradCheckResult grad_check(const UnmixerParams& params, const Sample& sample, double eps);

struct GradCheckInstance {
    UnmixerParams params;
    std::vector<Sample> samples;
};

/// Random parameters (including nonzero biases) and random partially-observed
/// samples for a gradient check.
GradCheckInstance make_gradcheck_instance(const ModelConfig& config, std::uint64_t seed, int n_samples = 2);

}  // namespace stunmix
