#pragma once

#include <span>
#include <vector>

#include "stunmix/data_model.hpp"
#include "stunmix/params.hpp"
#include "stunmix/rits.hpp"

namespace stunmix {

struct BritsOutput {
    Vector features;       // h_T of the forward pass followed by h_T of the reversed pass
    Matrix imputations_fwd;  // T x B
    Matrix imputations_bwd;  // T x B, re-aligned to forward time
    double imp_loss_fwd = 0.0;
    double imp_loss_bwd = 0.0;
    double cons_loss = 0.0;
};

/// Reverses values, mask and timestamps in time. Deltas are recomputed on the
/// reversed timeline, and reversed timestamps are mirrored so they increase.
SpectralSeries reverse_series(const SpectralSeries& series);

BritsOutput brits_forward(const Sample& sample, const BritsParams& params);

/// Average of the forward and re-aligned backward combined estimates.
Matrix brits_impute(const Sample& sample, const BritsParams& params);

/// Recorded forward and backward passes over a batch.
struct BritsTape {
    SeriesBatch fwd_batch;
    SeriesBatch bwd_batch;
    RitsTape fwd;
    RitsTape bwd;
    RowVector cons_loss;

    Matrix features() const;
};

void brits_forward_batch(std::span<const SpectralSeries* const> series, const BritsParams& params, BritsTape& tape);

/// Backpropagates dL/dfeatures (2H x N) and per-sample weights on the three
/// auxiliary losses into `grads`.
void brits_backward_batch(const BritsParams& params, const BritsTape& tape, const Matrix& d_features,
                          const RowVector& d_imp_fwd, const RowVector& d_imp_bwd, const RowVector& d_cons,
                          BritsParams& grads);

}  // namespace stunmix
