#pragma once

#include <span>
#include <utility>
#include <vector>

#include "stunmix/brits.hpp"
#include "stunmix/data_model.hpp"
#include "stunmix/params.hpp"

namespace stunmix {

struct Prediction {
    Vector logits;
    AbundanceVector abundances;
};

/// Per-sample loss = mse * sum_c (r_c - a_c)^2 + imp * (L_imp_fwd + L_imp_bwd) / 2 + cons * L_cons.
/// A batch loss is the mean of per-sample losses.
struct LossWeights {
    double mse = 1.0;
    double imp = 0.0;
    double cons = 0.0;

    static LossWeights from(const ModelConfig& config) { return {1.0, config.lambda_imp, config.lambda_cons}; }
};

/// Max-shifted softmax.
AbundanceVector softmax(const Vector& logits);

/// relu(W * selected_ancillary + b) over the feature group chosen by the config.
Vector ancillary_branch(const AncillaryVector& ancillary, const UnmixerParams& params);

std::pair<Prediction, BritsOutput> forward(const Sample& sample, const UnmixerParams& params);

double loss(std::span<const Prediction> predictions, std::span<const AbundanceVector> references,
            std::span<const BritsOutput> brits_outputs, const UnmixerParams& params);
double loss(std::span<const Prediction> predictions, std::span<const AbundanceVector> references,
            std::span<const BritsOutput> brits_outputs, const LossWeights& weights);

/// Recorded forward pass of the full network over one chunk of samples.
struct UnmixerTape {
    BritsTape brits;
    Matrix anc_in, anc_pre;  // n_anc x N, A x N
    Matrix head_in;          // (2H [+ A]) x N
    Matrix logits;           // K x N
    Matrix abundances;       // K x N
};

void unmixer_forward_batch(std::span<const Sample* const> samples, const UnmixerParams& params, UnmixerTape& tape);

/// Sum over the chunk of per-sample losses.
double unmixer_loss_sum(std::span<const Sample* const> samples, const UnmixerTape& tape, const LossWeights& weights);

/// Accumulates `scale` times the gradient of the chunk's loss sum into `grads`.
void unmixer_backward_batch(std::span<const Sample* const> samples, const UnmixerParams& params,
                            const UnmixerTape& tape, const LossWeights& weights, double scale, UnmixerParams& grads);

/// Mean loss over `batch` and, when `grads` is given, its gradient (overwritten).
double batch_loss_and_gradient(std::span<const Sample* const> batch, const UnmixerParams& params,
                               UnmixerParams* grads, int threads, const LossWeights& weights);
double batch_loss_and_gradient(std::span<const Sample* const> batch, const UnmixerParams& params,
                               UnmixerParams* grads, int threads = 1);

/// K x N predicted abundances.
Matrix predict_abundances(std::span<const Sample* const> samples, const UnmixerParams& params, int threads = 1);

}  // namespace stunmix
