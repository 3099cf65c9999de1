#include "stunmix/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "stunmix/error.hpp"
#include "stunmix/io.hpp"
#include "stunmix/random.hpp"

namespace stunmix {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5348;
constexpr std::uint64_t kGradCheckStream = 0x4743;

std::vector<const Sample*> pointers(const Dataset& ds, std::span<const std::size_t> ids) {
    std::vector<const Sample*> out;
    out.reserve(ids.size());
    for (std::size_t id : ids) out.push_back(&ds[id]);
    return out;
}

void check_split(const Dataset& dataset, const DataSplit& split) {
    if (split.train.empty()) fail(ErrorKind::EmptyTrainingSet, "split has no training samples");
    std::vector<char> seen(dataset.size(), 0);
    for (const auto* ids : {&split.train, &split.test}) {
        for (std::size_t id : *ids) {
            if (id >= dataset.size()) fail(ErrorKind::InvalidArgument, "split index out of range");
            if (seen[id]++) fail(ErrorKind::InvalidArgument, "train and test sets overlap");
        }
    }
}

void check_dataset_matches(const Dataset& dataset, const ModelConfig& model) {
    if (dataset.steps() != model.steps || dataset.bands() != model.bands || dataset.classes() != model.classes) {
        fail(ErrorKind::ShapeMismatch, "dataset is T=" + std::to_string(dataset.steps()) +
                                           " B=" + std::to_string(dataset.bands()) +
                                           " K=" + std::to_string(dataset.classes()) + " but the model expects T=" +
                                           std::to_string(model.steps) + " B=" + std::to_string(model.bands) +
                                           " K=" + std::to_string(model.classes));
    }
}

Matrix reference_matrix(const Dataset& dataset, std::span<const std::size_t> ids) {
    Matrix refs(dataset.classes(), static_cast<Eigen::Index>(ids.size()));
    for (std::size_t j = 0; j < ids.size(); ++j) refs.col(static_cast<Eigen::Index>(j)) = dataset[ids[j]].reference.values;
    return refs;
}

void run_epochs(const Dataset& normalized, const DataSplit& split, const TrainConfig& config,
                const TrainOptions& options, TrainState& state) {
    const int stop = std::min(config.epochs, options.stop_after_epochs.value_or(config.epochs));
    std::vector<std::size_t> order = split.train;
    for (int epoch = state.epochs_done; epoch < stop; ++epoch) {
        order = split.train;
        if (config.shuffle) {
            auto rng = derive_rng(config.seed, kShuffleStream, static_cast<std::uint64_t>(epoch));
            std::shuffle(order.begin(), order.end(), rng);
        }
        const double lr = cosine_lr(epoch, config.epochs, config.lr0);
        double loss_sum = 0.0;
        UnmixerParams grads;
        for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t len = std::min(static_cast<std::size_t>(config.batch_size), order.size() - begin);
            const auto batch = pointers(normalized, std::span(order).subspan(begin, len));
            const double loss = batch_loss_and_gradient(batch, state.params, &grads, options.threads);
            loss_sum += loss * static_cast<double>(len);
            adam_step(state.params, grads, state.adam, lr, config.beta1, config.beta2, config.adam_eps);
        }
        HistoryRow row;
        row.epoch = epoch;
        row.lr = lr;
        row.train_loss = loss_sum / static_cast<double>(order.size());
        if (options.evaluate_test && !split.test.empty()) {
            const auto test = pointers(normalized, split.test);
            const Matrix preds = predict_abundances(test, state.params, options.threads);
            const auto report = metrics::compute_report(reference_matrix(normalized, split.test), preds,
                                                        normalized.legend());
            row.test_mae = report.macro_mae;
            row.test_rmse = report.macro_rmse;
            row.test_rrmse = report.macro_rrmse;
            row.test_cc = report.macro_cc;
            row.test_f1 = report.macro_f1;
        }
        state.history.push_back(row);
        state.epochs_done = epoch + 1;
        if (options.on_epoch) options.on_epoch(row);
    }
}

}  // namespace

UnmixerParams init_params(std::uint64_t seed, const ModelConfig& config) {
    UnmixerParams p = UnmixerParams::zeros(config);
    std::mt19937_64 rng(seed);
    for (auto& [name, m] : named_tensors(p)) {
        if (m->cols() == 1) continue;  // biases
        const double s = std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
        std::uniform_real_distribution<double> dist(-s, s);
        for (Eigen::Index j = 0; j < m->cols(); ++j) {
            for (Eigen::Index i = 0; i < m->rows(); ++i) (*m)(i, j) = dist(rng);
        }
    }
    p.brits.fwd.b_f.setOnes();
    p.brits.bwd.b_f.setOnes();
    p.zero_feature_diagonals();
    return p;
}

double cosine_lr(int epoch, int total_epochs, double lr0) {
    if (total_epochs < 1 || epoch < 0 || epoch >= total_epochs) {
        fail(ErrorKind::InvalidArgument, "epoch " + std::to_string(epoch) + " outside [0, " +
                                             std::to_string(total_epochs) + ")");
    }
    return 0.5 * lr0 * (1.0 + std::cos(std::numbers::pi * epoch / total_epochs));
}

AdamState AdamState::zeros_like(const UnmixerParams& params) {
    AdamState s;
    for (const auto& t : named_tensors(params)) {
        s.m.push_back(Matrix::Zero(t.value->rows(), t.value->cols()));
        s.v.push_back(Matrix::Zero(t.value->rows(), t.value->cols()));
    }
    return s;
}

void adam_step(UnmixerParams& params, const UnmixerParams& grads, AdamState& state, double lr, double beta1,
               double beta2, double eps) {
    auto theta = named_tensors(params);
    const auto g = named_tensors(grads);
    if (g.size() != theta.size() || state.m.size() != theta.size() || state.v.size() != theta.size()) {
        fail(ErrorKind::ShapeMismatch, "optimizer state does not match the parameters");
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (g[i].value->rows() != theta[i].value->rows() || g[i].value->cols() != theta[i].value->cols()) {
            fail(ErrorKind::ShapeMismatch, "gradient shape differs for " + theta[i].name);
        }
        if (!g[i].value->allFinite()) fail(ErrorKind::NonFinite, "non-finite gradient for parameter " + theta[i].name);
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const Matrix& grad = *g[i].value;
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad.cwiseAbs2();
        const auto m_hat = state.m[i].array() / c1;
        const auto v_hat = state.v[i].array() / c2;
        theta[i].value->array() -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    params.zero_feature_diagonals();
}

std::string format_history_csv(std::span<const HistoryRow> rows) {
    std::string out = "epoch,lr,train_loss,test_mae,test_rmse,test_rrmse,test_cc,test_f1\n";
    for (const auto& r : rows) {
        out += std::to_string(r.epoch) + ',' + io::format_double(r.lr) + ',' + io::format_double(r.train_loss) + ',' +
               metrics::format_metric(r.test_mae) + ',' + metrics::format_metric(r.test_rmse) + ',' +
               metrics::format_metric(r.test_rrmse) + ',' + metrics::format_metric(r.test_cc) + ',' +
               metrics::format_metric(r.test_f1) + '\n';
    }
    return out;
}

TrainState train(const Dataset& dataset, const DataSplit& split, const ModelConfig& model,
                 const TrainConfig& config, const TrainOptions& options, const UnmixerParams* warm_start) {
    model.validate();
    config.validate();
    check_dataset_matches(dataset, model);
    check_split(dataset, split);

    TrainState state;
    state.norm = fit_normalization(dataset, split.train);
    if (warm_start) {
        if (named_tensors(*warm_start).size() != named_tensors(UnmixerParams::zeros(model)).size() ||
            warm_start->config.hidden != model.hidden || warm_start->config.bands != model.bands ||
            warm_start->config.classes != model.classes || warm_start->config.use_ancillary != model.use_ancillary ||
            warm_start->config.anc_hidden != model.anc_hidden) {
            fail(ErrorKind::ShapeMismatch, "warm-start parameters do not match the model configuration");
        }
        state.params = *warm_start;
        state.params.config = model;
    } else {
        state.params = init_params(config.seed, model);
    }
    state.adam = AdamState::zeros_like(state.params);
    const Dataset normalized = apply_normalization(dataset, state.norm);
    run_epochs(normalized, split, config, options, state);
    return state;
}

TrainState resume_training(const Dataset& dataset, const DataSplit& split, const TrainConfig& config,
                           TrainState state, const TrainOptions& options) {
    config.validate();
    check_dataset_matches(dataset, state.params.config);
    check_split(dataset, split);
    if (state.epochs_done > config.epochs) fail(ErrorKind::InvalidArgument, "checkpoint is past the final epoch");
    const Dataset normalized = apply_normalization(dataset, state.norm);
    run_epochs(normalized, split, config, options, state);
    return state;
}

double dataset_loss(const Dataset& normalized, std::span<const std::size_t> ids, const UnmixerParams& params,
                    int threads) {
    const auto ptrs = pointers(normalized, ids);
    return batch_loss_and_gradient(ptrs, params, nullptr, threads);
}

Evaluation evaluate_predictions(const Dataset& dataset, std::span<const std::size_t> test_ids, const Matrix& preds) {
    if (test_ids.empty()) fail(ErrorKind::EmptyTestSet, "test split is empty");
    Evaluation e;
    e.refs = reference_matrix(dataset, test_ids);
    e.preds = preds;
    e.report = metrics::compute_report(e.refs, e.preds, dataset.legend());
    return e;
}

Evaluation evaluate(const UnmixerParams& params, const NormStats& norm, const Dataset& dataset,
                    const DataSplit& split, int threads) {
    if (split.test.empty()) fail(ErrorKind::EmptyTestSet, "test split is empty");
    check_dataset_matches(dataset, params.config);
    const Dataset normalized = apply_normalization(dataset, norm);
    const Matrix preds = predict_abundances(pointers(normalized, split.test), params, threads);
    return evaluate_predictions(dataset, split.test, preds);
}

Matrix mean_abundance_predictions(const Dataset& dataset, const DataSplit& split) {
    if (split.train.empty()) fail(ErrorKind::EmptyTrainingSet, "split has no training samples");
    Vector mean = Vector::Zero(dataset.classes());
    for (std::size_t id : split.train) mean += dataset[id].reference.values;
    mean /= static_cast<double>(split.train.size());
    return mean.replicate(1, static_cast<Eigen::Index>(split.test.size()));
}

GradCheckResult grad_check(const UnmixerParams& params, std::span<const Sample* const> samples,
                           const GradCheckOptions& options) {
    if (!(options.eps > 0.0)) fail(ErrorKind::InvalidArgument, "finite-difference step must be > 0");
    const LossWeights weights = options.weights.value_or(LossWeights::from(params.config));
    UnmixerParams analytic;
    batch_loss_and_gradient(samples, params, &analytic, options.threads, weights);
    if (options.corrupt_backward) analytic.head_b.array() += 0.1;

    UnmixerParams probe = params;
    auto probe_tensors = named_tensors(probe);
    const auto grad_tensors = named_tensors(static_cast<const UnmixerParams&>(analytic));
    GradCheckResult result;
    for (std::size_t ti = 0; ti < probe_tensors.size(); ++ti) {
        Matrix& m = *probe_tensors[ti].value;
        const bool constrained_diag = is_feature_regression(probe_tensors[ti].name);
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                if (constrained_diag && i == j) continue;
                const double saved = m(i, j);
                m(i, j) = saved + options.eps;
                const double up = batch_loss_and_gradient(samples, probe, nullptr, options.threads, weights);
                m(i, j) = saved - options.eps;
                const double down = batch_loss_and_gradient(samples, probe, nullptr, options.threads, weights);
                m(i, j) = saved;
                const double numeric = (up - down) / (2.0 * options.eps);
                const double a = (*grad_tensors[ti].value)(i, j);
                const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-12});
                ++result.checked;
                if (result.checked == 1 || rel > result.max_rel_error) {
                    result.max_rel_error = rel;
                    result.worst_param = probe_tensors[ti].name;
                    result.worst_index = j * m.rows() + i;
                }
            }
        }
    }
    return result;
}

GradCheckResult grad_check(const UnmixerParams& params, const Sample& sample, double eps) {
    const Sample* ptr = &sample;
    GradCheckOptions options;
    options.eps = eps;
    return grad_check(params, std::span<const Sample* const>(&ptr, 1), options);
}

GradCheckInstance make_gradcheck_instance(const ModelConfig& config, std::uint64_t seed, int n_samples) {
    GradCheckInstance inst;
    inst.params = init_params(seed, config);
    auto rng = derive_rng(seed, kGradCheckStream);
    std::uniform_real_distribution<double> bias(-0.5, 0.5);
    for (auto& [name, m] : named_tensors(inst.params)) {
        if (m->cols() == 1) {
            for (Eigen::Index i = 0; i < m->rows(); ++i) (*m)(i, 0) = bias(rng);
        }
    }
    inst.params.zero_feature_diagonals();

    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution observed(0.7);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::vector<double> timestamps(static_cast<std::size_t>(config.steps));
    std::iota(timestamps.begin(), timestamps.end(), 0.0);
    for (int s = 0; s < n_samples; ++s) {
        Matrix values(config.steps, config.bands), mask(config.steps, config.bands);
        for (int t = 0; t < config.steps; ++t) {
            for (int b = 0; b < config.bands; ++b) {
                values(t, b) = normal(rng);
                mask(t, b) = observed(rng) ? 1.0 : 0.0;
            }
        }
        AncillaryVector anc;
        for (auto& a : anc.values) a = normal(rng);
        Vector ref(config.classes);
        for (int k = 0; k < config.classes; ++k) ref[k] = unit(rng);
        ref /= ref.sum();
        inst.samples.push_back(make_sample(values, mask, timestamps, anc, ref, s, 0, "gc_" + std::to_string(s)));
    }
    return inst;
}

}  // namespace stunmix
