#pragma once

#include <span>
#include <vector>

#include "stunmix/data_model.hpp"
#include "stunmix/params.hpp"

namespace stunmix {

using RowVector = Eigen::RowVectorXd;

struct RitsState {
    Vector h;
    Vector c;

    static RitsState zeros(int hidden) { return {Vector::Zero(hidden), Vector::Zero(hidden)}; }
};

struct RitsStepOutput {
    RitsState state;
    Vector imputation;  // combined estimate for every band of this step
    double step_loss = 0.0;
};

struct RitsForward {
    Vector h_last;
    Matrix imputations;  // T x B
    double imp_loss = 0.0;
};

/// gamma = exp(-max(0, W delta + b)), elementwise in (0, 1].
Vector temporal_decay(const Vector& delta, const Matrix& w, const Matrix& b);

RitsStepOutput rits_step(const RitsState& state, const Vector& x, const Vector& mask, const Vector& delta,
                         const RitsParams& params);

RitsForward rits_forward(const SpectralSeries& series, const RitsParams& params);

// ---------------------------------------------------------------------------
// Batched implementation. Each per-step matrix is B x N with one column per
// sample; observed values are copied and missing ones replaced by zero so the
// placeholder stored in a series can never leak into the computation.

struct SeriesBatch {
    std::vector<Matrix> values;
    std::vector<Matrix> mask;
    std::vector<Matrix> deltas;

    int steps() const { return static_cast<int>(values.size()); }
    int size() const { return values.empty() ? 0 : static_cast<int>(values.front().cols()); }
};

SeriesBatch make_series_batch(std::span<const SpectralSeries* const> series);

struct RitsStepCache {
    Matrix gamma_pre, gamma;
    Matrix gamma_h_pre, gamma_h;
    Matrix h_prev, c_prev, h_dec;
    Matrix x_hat, x_c, z_hat, beta, c_hat, u;
    Matrix gate_i, gate_f, gate_o, gate_g, c, tanh_c, h;
    RowVector inv_count;  // 1 / max(1, observed bands)
    RowVector loss;
};

struct RitsTape {
    std::vector<RitsStepCache> steps;

    const Matrix& h_last() const { return steps.back().h; }
    /// Mean of the per-step losses, one entry per sample.
    RowVector imp_loss() const;
};

void rits_step_batch(const Matrix& x, const Matrix& mask, const Matrix& delta, const Matrix& h_prev,
                     const Matrix& c_prev, const RitsParams& params, RitsStepCache& cache);

void rits_forward_batch(const SeriesBatch& batch, const RitsParams& params, RitsTape& tape);

/// Backpropagates through a recorded pass and accumulates into `grads`.
///   d_h_last:      dL/dh_T, H x N
///   d_imputations: dL/d(combined estimate) per step, B x N each; may be empty
///   d_imp_loss:    dL/d(imputation loss) per sample, 1 x N
void rits_backward_batch(const SeriesBatch& batch, const RitsParams& params, const RitsTape& tape,
                         const Matrix& d_h_last, const std::vector<Matrix>& d_imputations,
                         const RowVector& d_imp_loss, RitsParams& grads);

}  // namespace stunmix
