#include "stunmix/brits.hpp"

#include "stunmix/error.hpp"

namespace stunmix {

SpectralSeries reverse_series(const SpectralSeries& series) {
    SpectralSeries out;
    out.values = series.values.colwise().reverse();
    out.mask = series.mask.colwise().reverse();
    const std::size_t steps = series.timestamps.size();
    out.timestamps.resize(steps);
    if (steps > 0) {
        // Mirror within [first, last] so the reversed timeline still increases.
        const double span_sum = series.timestamps.front() + series.timestamps.back();
        for (std::size_t t = 0; t < steps; ++t) out.timestamps[t] = span_sum - series.timestamps[steps - 1 - t];
    }
    out.deltas = compute_deltas(out.mask, out.timestamps);
    return out;
}

Matrix BritsTape::features() const {
    const Matrix& hf = fwd.h_last();
    const Matrix& hb = bwd.h_last();
    Matrix out(hf.rows() + hb.rows(), hf.cols());
    out.topRows(hf.rows()) = hf;
    out.bottomRows(hb.rows()) = hb;
    return out;
}

void brits_forward_batch(std::span<const SpectralSeries* const> series, const BritsParams& params, BritsTape& tape) {
    std::vector<SpectralSeries> reversed;
    reversed.reserve(series.size());
    for (const auto* s : series) reversed.push_back(reverse_series(*s));
    std::vector<const SpectralSeries*> reversed_ptrs;
    reversed_ptrs.reserve(reversed.size());
    for (const auto& s : reversed) reversed_ptrs.push_back(&s);

    tape.fwd_batch = make_series_batch(series);
    tape.bwd_batch = make_series_batch(reversed_ptrs);
    rits_forward_batch(tape.fwd_batch, params.fwd, tape.fwd);
    rits_forward_batch(tape.bwd_batch, params.bwd, tape.bwd);

    const int steps = tape.fwd_batch.steps();
    const auto n = tape.fwd_batch.size();
    const double scale = 1.0 / (static_cast<double>(steps) * params.fwd.bands());
    tape.cons_loss = RowVector::Zero(n);
    for (int t = 0; t < steps; ++t) {
        const Matrix& f = tape.fwd.steps[static_cast<std::size_t>(t)].c_hat;
        const Matrix& b = tape.bwd.steps[static_cast<std::size_t>(steps - 1 - t)].c_hat;
        tape.cons_loss += (f - b).cwiseAbs().colwise().sum();
    }
    tape.cons_loss *= scale;
}

void brits_backward_batch(const BritsParams& params, const BritsTape& tape, const Matrix& d_features,
                          const RowVector& d_imp_fwd, const RowVector& d_imp_bwd, const RowVector& d_cons,
                          BritsParams& grads) {
    const int steps = tape.fwd_batch.steps();
    const int hidden = params.fwd.hidden();
    const double scale = 1.0 / (static_cast<double>(steps) * params.fwd.bands());

    std::vector<Matrix> d_imp_f(static_cast<std::size_t>(steps));
    std::vector<Matrix> d_imp_b(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
        const auto tf = static_cast<std::size_t>(t);
        const auto tb = static_cast<std::size_t>(steps - 1 - t);
        const Matrix diff = tape.fwd.steps[tf].c_hat - tape.bwd.steps[tb].c_hat;
        const Matrix s = diff.unaryExpr([](double v) { return double((v > 0.0) - (v < 0.0)); });
        const Matrix g = (s.array().rowwise() * (d_cons.array() * scale)).matrix();
        d_imp_f[tf] = g;
        d_imp_b[tb] = -g;
    }
    rits_backward_batch(tape.fwd_batch, params.fwd, tape.fwd, d_features.topRows(hidden), d_imp_f, d_imp_fwd,
                        grads.fwd);
    rits_backward_batch(tape.bwd_batch, params.bwd, tape.bwd, d_features.bottomRows(hidden), d_imp_b, d_imp_bwd,
                        grads.bwd);
}

BritsOutput brits_forward(const Sample& sample, const BritsParams& params) {
    const SpectralSeries* ptr = &sample.series;
    BritsTape tape;
    brits_forward_batch(std::span<const SpectralSeries* const>(&ptr, 1), params, tape);
    const int steps = sample.series.steps();
    const int bands = sample.series.bands();
    BritsOutput out;
    out.features = tape.features().col(0);
    out.imputations_fwd.resize(steps, bands);
    out.imputations_bwd.resize(steps, bands);
    for (int t = 0; t < steps; ++t) {
        out.imputations_fwd.row(t) = tape.fwd.steps[static_cast<std::size_t>(t)].c_hat.col(0).transpose();
        out.imputations_bwd.row(t) =
            tape.bwd.steps[static_cast<std::size_t>(steps - 1 - t)].c_hat.col(0).transpose();
    }
    out.imp_loss_fwd = tape.fwd.imp_loss()[0];
    out.imp_loss_bwd = tape.bwd.imp_loss()[0];
    out.cons_loss = tape.cons_loss[0];
    return out;
}

Matrix brits_impute(const Sample& sample, const BritsParams& params) {
    const BritsOutput out = brits_forward(sample, params);
    return 0.5 * (out.imputations_fwd + out.imputations_bwd);
}

}  // namespace stunmix
