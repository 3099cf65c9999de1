#include "stunmix/unmixer.hpp"

#include <cmath>

#include "stunmix/error.hpp"
#include "stunmix/parallel.hpp"

namespace stunmix {

namespace {

Matrix softmax_columns(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const double mx = logits.col(j).maxCoeff();
        out.col(j) = (logits.col(j).array() - mx).exp().matrix();
        out.col(j) /= out.col(j).sum();
    }
    return out;
}

std::vector<const SpectralSeries*> series_of(std::span<const Sample* const> samples) {
    std::vector<const SpectralSeries*> out;
    out.reserve(samples.size());
    for (const auto* s : samples) out.push_back(&s->series);
    return out;
}

void check_sample_shape(const Sample& s, const ModelConfig& c) {
    if (s.series.steps() != c.steps || s.series.bands() != c.bands) {
        fail(ErrorKind::ShapeMismatch, "sample " + s.pixel_id + " is " + std::to_string(s.series.steps()) + "x" +
                                           std::to_string(s.series.bands()) + " but the model expects " +
                                           std::to_string(c.steps) + "x" + std::to_string(c.bands));
    }
}

}  // namespace

AbundanceVector softmax(const Vector& logits) {
    if (!logits.allFinite()) fail(ErrorKind::NonFinite, "softmax input is not finite");
    return AbundanceVector{softmax_columns(logits).col(0)};
}

Vector ancillary_branch(const AncillaryVector& ancillary, const UnmixerParams& params) {
    const auto [begin, end] = params.config.ancillary_range();
    if (begin == end) return Vector::Zero(0);
    Vector in(static_cast<Eigen::Index>(end - begin));
    for (std::size_t j = begin; j < end; ++j) in[static_cast<Eigen::Index>(j - begin)] = ancillary.values[j];
    Vector pre = params.anc_w * in + params.anc_b.col(0);
    return pre.cwiseMax(0.0);
}

void unmixer_forward_batch(std::span<const Sample* const> samples, const UnmixerParams& params, UnmixerTape& tape) {
    const ModelConfig& c = params.config;
    for (const auto* s : samples) check_sample_shape(*s, c);
    const auto series = series_of(samples);
    brits_forward_batch(series, params.brits, tape.brits);

    const auto n = static_cast<Eigen::Index>(samples.size());
    tape.head_in.resize(c.head_inputs(), n);
    tape.head_in.topRows(2 * c.hidden) = tape.brits.features();
    if (c.uses_ancillary()) {
        const auto [begin, end] = c.ancillary_range();
        tape.anc_in.resize(static_cast<Eigen::Index>(end - begin), n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (std::size_t f = begin; f < end; ++f) {
                tape.anc_in(static_cast<Eigen::Index>(f - begin), j) = samples[static_cast<std::size_t>(j)]->ancillary.values[f];
            }
        }
        tape.anc_pre = params.anc_w * tape.anc_in;
        tape.anc_pre.colwise() += params.anc_b.col(0);
        tape.head_in.bottomRows(c.anc_hidden) = tape.anc_pre.cwiseMax(0.0);
    }
    tape.logits = params.head_w * tape.head_in;
    tape.logits.colwise() += params.head_b.col(0);
    if (!tape.logits.allFinite()) fail(ErrorKind::NonFinite, "non-finite logits");
    tape.abundances = softmax_columns(tape.logits);
}

double unmixer_loss_sum(std::span<const Sample* const> samples, const UnmixerTape& tape, const LossWeights& w) {
    const RowVector imp_f = tape.brits.fwd.imp_loss();
    const RowVector imp_b = tape.brits.bwd.imp_loss();
    double total = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const double sq = (samples[j]->reference.values - tape.abundances.col(col)).squaredNorm();
        total += w.mse * sq + w.imp * 0.5 * (imp_f[col] + imp_b[col]) + w.cons * tape.brits.cons_loss[col];
    }
    return total;
}

void unmixer_backward_batch(std::span<const Sample* const> samples, const UnmixerParams& params,
                            const UnmixerTape& tape, const LossWeights& w, double scale, UnmixerParams& grads) {
    const ModelConfig& c = params.config;
    const auto n = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index k = tape.abundances.rows();

    Matrix refs(k, n);
    for (Eigen::Index j = 0; j < n; ++j) refs.col(j) = samples[static_cast<std::size_t>(j)]->reference.values;
    const Matrix d_abund = (-2.0 * w.mse * scale) * (refs - tape.abundances);
    // Softmax Jacobian-vector product: a * (g - <a, g>).
    const RowVector inner = tape.abundances.cwiseProduct(d_abund).colwise().sum();
    const Matrix d_logits = (tape.abundances.array() * (d_abund.array().rowwise() - inner.array())).matrix();

    grads.head_w.noalias() += d_logits * tape.head_in.transpose();
    grads.head_b += d_logits.rowwise().sum();
    const Matrix d_head_in = params.head_w.transpose() * d_logits;

    if (c.uses_ancillary()) {
        const Matrix d_pre =
            (d_head_in.bottomRows(c.anc_hidden).array() * (tape.anc_pre.array() > 0.0).cast<double>()).matrix();
        grads.anc_w.noalias() += d_pre * tape.anc_in.transpose();
        grads.anc_b += d_pre.rowwise().sum();
    }

    const RowVector d_imp = RowVector::Constant(n, 0.5 * w.imp * scale);
    const RowVector d_cons = RowVector::Constant(n, w.cons * scale);
    brits_backward_batch(params.brits, tape.brits, d_head_in.topRows(2 * c.hidden), d_imp, d_imp, d_cons,
                         grads.brits);
}

double batch_loss_and_gradient(std::span<const Sample* const> batch, const UnmixerParams& params,
                               UnmixerParams* grads, int threads, const LossWeights& weights) {
    if (batch.empty()) fail(ErrorKind::EmptyTrainingSet, "empty batch");
    const std::size_t chunks = chunk_count(batch.size());
    const double scale = 1.0 / static_cast<double>(batch.size());
    std::vector<double> losses(chunks, 0.0);
    std::vector<UnmixerParams> partial(grads ? chunks : 0);

    parallel_for(chunks, threads, [&](std::size_t ci) {
        const std::size_t begin = ci * kChunkSize;
        const auto chunk = batch.subspan(begin, std::min(kChunkSize, batch.size() - begin));
        UnmixerTape tape;
        unmixer_forward_batch(chunk, params, tape);
        losses[ci] = unmixer_loss_sum(chunk, tape, weights);
        if (grads) {
            partial[ci] = params.zeros_like();
            unmixer_backward_batch(chunk, params, tape, weights, scale, partial[ci]);
        }
    });

    double total = 0.0;
    for (double l : losses) total += l;
    if (grads) {
        *grads = std::move(partial.front());
        for (std::size_t ci = 1; ci < chunks; ++ci) grads->add_scaled(partial[ci], 1.0);
        grads->zero_feature_diagonals();
    }
    return total * scale;
}

double batch_loss_and_gradient(std::span<const Sample* const> batch, const UnmixerParams& params,
                               UnmixerParams* grads, int threads) {
    return batch_loss_and_gradient(batch, params, grads, threads, LossWeights::from(params.config));
}

Matrix predict_abundances(std::span<const Sample* const> samples, const UnmixerParams& params, int threads) {
    Matrix out(params.config.classes, static_cast<Eigen::Index>(samples.size()));
    parallel_for(chunk_count(samples.size()), threads, [&](std::size_t ci) {
        const std::size_t begin = ci * kChunkSize;
        const std::size_t len = std::min(kChunkSize, samples.size() - begin);
        UnmixerTape tape;
        unmixer_forward_batch(samples.subspan(begin, len), params, tape);
        out.middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(len)) = tape.abundances;
    });
    return out;
}

std::pair<Prediction, BritsOutput> forward(const Sample& sample, const UnmixerParams& params) {
    const Sample* ptr = &sample;
    UnmixerTape tape;
    unmixer_forward_batch(std::span<const Sample* const>(&ptr, 1), params, tape);
    Prediction pred{tape.logits.col(0), AbundanceVector{tape.abundances.col(0)}};
    return {std::move(pred), brits_forward(sample, params.brits)};
}

double loss(std::span<const Prediction> predictions, std::span<const AbundanceVector> references,
            std::span<const BritsOutput> brits_outputs, const LossWeights& w) {
    if (predictions.size() != references.size() || predictions.size() != brits_outputs.size()) {
        fail(ErrorKind::ShapeMismatch, "predictions, references and BRITS outputs differ in count");
    }
    if (predictions.empty()) fail(ErrorKind::ShapeMismatch, "empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& a = predictions[i].abundances.values;
        const auto& r = references[i].values;
        if (a.size() != r.size()) fail(ErrorKind::ShapeMismatch, "prediction and reference differ in class count");
        const auto& b = brits_outputs[i];
        total += w.mse * (r - a).squaredNorm() + w.imp * 0.5 * (b.imp_loss_fwd + b.imp_loss_bwd) +
                 w.cons * b.cons_loss;
    }
    return total / static_cast<double>(predictions.size());
}

double loss(std::span<const Prediction> predictions, std::span<const AbundanceVector> references,
            std::span<const BritsOutput> brits_outputs, const UnmixerParams& params) {
    return loss(predictions, references, brits_outputs, LossWeights::from(params.config));
}

}  // namespace stunmix
