#include "stunmix/rits.hpp"

#include "stunmix/error.hpp"

namespace stunmix {

namespace {

Matrix sigmoid(const Matrix& a) { return (1.0 / (1.0 + (-a.array()).exp())).matrix(); }

Matrix affine(const Matrix& w, const Matrix& in, const Matrix& b) {
    Matrix out = w * in;
    out.colwise() += b.col(0);
    return out;
}

Matrix decay(const Matrix& pre) { return (-pre.array().max(0.0)).exp().matrix(); }

// d/dpre of exp(-max(0, pre)), evaluated through the cached output.
Matrix decay_backward(const Matrix& d_out, const Matrix& pre, const Matrix& out) {
    return (d_out.array() * -out.array() * (pre.array() > 0.0).cast<double>()).matrix();
}

Matrix sign(const Matrix& a) { return a.unaryExpr([](double v) { return double((v > 0.0) - (v < 0.0)); }); }

void check_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) fail(ErrorKind::NonFinite, std::string("non-finite value in ") + what);
}

}  // namespace

Vector temporal_decay(const Vector& delta, const Matrix& w, const Matrix& b) {
    return decay(affine(w, delta, b));
}

RowVector RitsTape::imp_loss() const {
    RowVector total = RowVector::Zero(steps.front().loss.size());
    for (const auto& s : steps) total += s.loss;
    return total / static_cast<double>(steps.size());
}

SeriesBatch make_series_batch(std::span<const SpectralSeries* const> series) {
    if (series.empty()) fail(ErrorKind::EmptyDataset, "empty batch");
    const int steps = series.front()->steps();
    const int bands = series.front()->bands();
    const auto n = static_cast<Eigen::Index>(series.size());
    SeriesBatch batch;
    batch.values.assign(static_cast<std::size_t>(steps), Matrix::Zero(bands, n));
    batch.mask.assign(static_cast<std::size_t>(steps), Matrix::Zero(bands, n));
    batch.deltas.assign(static_cast<std::size_t>(steps), Matrix::Zero(bands, n));
    for (Eigen::Index j = 0; j < n; ++j) {
        const SpectralSeries& s = *series[static_cast<std::size_t>(j)];
        if (s.steps() != steps || s.bands() != bands) fail(ErrorKind::ShapeMismatch, "batch series differ in shape");
        for (int t = 0; t < steps; ++t) {
            auto& v = batch.values[static_cast<std::size_t>(t)];
            auto& m = batch.mask[static_cast<std::size_t>(t)];
            auto& d = batch.deltas[static_cast<std::size_t>(t)];
            for (int b = 0; b < bands; ++b) {
                const bool observed = s.mask(t, b) == 1.0;
                m(b, j) = observed ? 1.0 : 0.0;
                v(b, j) = observed ? s.values(t, b) : 0.0;
                d(b, j) = s.deltas(t, b);
            }
        }
    }
    return batch;
}

void rits_step_batch(const Matrix& x, const Matrix& mask, const Matrix& delta, const Matrix& h_prev,
                     const Matrix& c_prev, const RitsParams& p, RitsStepCache& s) {
    const int bands = p.bands();
    const int hidden = p.hidden();
    const Eigen::Index n = x.cols();
    const auto missing = (1.0 - mask.array());

    s.h_prev = h_prev;
    s.c_prev = c_prev;
    s.gamma_pre = affine(p.w_gamma, delta, p.b_gamma);
    s.gamma = decay(s.gamma_pre);
    if (p.hidden_decay()) {
        s.gamma_h_pre = affine(p.w_gamma_h, delta, p.b_gamma_h);
        s.gamma_h = decay(s.gamma_h_pre);
        s.h_dec = s.gamma_h.cwiseProduct(h_prev);
    } else {
        s.h_dec = h_prev;
    }

    s.x_hat = affine(p.w_x, s.h_dec, p.b_x);
    s.x_c = (mask.array() * x.array() + missing * s.x_hat.array()).matrix();
    s.z_hat = affine(p.w_z, s.x_c, p.b_z);
    Matrix beta_pre = p.w_beta.leftCols(bands) * s.gamma + p.w_beta.rightCols(bands) * mask;
    beta_pre.colwise() += p.b_beta.col(0);
    s.beta = sigmoid(beta_pre);
    s.c_hat = (s.beta.array() * s.z_hat.array() + (1.0 - s.beta.array()) * s.x_hat.array()).matrix();

    s.u.resize(2 * bands + hidden, n);
    s.u.topRows(bands) = (mask.array() * x.array() + missing * s.c_hat.array()).matrix();
    s.u.middleRows(bands, bands) = mask;
    s.u.bottomRows(hidden) = s.h_dec;

    s.gate_i = sigmoid(affine(p.w_i, s.u, p.b_i));
    s.gate_f = sigmoid(affine(p.w_f, s.u, p.b_f));
    s.gate_o = sigmoid(affine(p.w_o, s.u, p.b_o));
    s.gate_g = affine(p.w_g, s.u, p.b_g).array().tanh().matrix();
    s.c = (s.gate_f.array() * c_prev.array() + s.gate_i.array() * s.gate_g.array()).matrix();
    s.tanh_c = s.c.array().tanh().matrix();
    s.h = (s.gate_o.array() * s.tanh_c.array()).matrix();

    s.inv_count = (1.0 / mask.colwise().sum().array().max(1.0)).matrix();
    const Matrix residual = (x - s.x_hat).cwiseAbs() + (x - s.z_hat).cwiseAbs() + (x - s.c_hat).cwiseAbs();
    s.loss = (mask.cwiseProduct(residual).colwise().sum().array() * s.inv_count.array()).matrix();

    check_finite(s.h, "recurrent hidden state");
    check_finite(s.c_hat, "imputation estimate");
}

void rits_forward_batch(const SeriesBatch& batch, const RitsParams& params, RitsTape& tape) {
    const int steps = batch.steps();
    if (steps < 1) fail(ErrorKind::ShapeMismatch, "series has no time steps");
    if (batch.values.front().rows() != params.bands()) {
        fail(ErrorKind::ShapeMismatch, "series band count differs from the model");
    }
    const Eigen::Index n = batch.size();
    tape.steps.resize(static_cast<std::size_t>(steps));
    Matrix h = Matrix::Zero(params.hidden(), n);
    Matrix c = Matrix::Zero(params.hidden(), n);
    for (int t = 0; t < steps; ++t) {
        const auto i = static_cast<std::size_t>(t);
        RitsStepCache& s = tape.steps[i];
        rits_step_batch(batch.values[i], batch.mask[i], batch.deltas[i], h, c, params, s);
        h = s.h;
        c = s.c;
    }
}

void rits_backward_batch(const SeriesBatch& batch, const RitsParams& p, const RitsTape& tape,
                         const Matrix& d_h_last, const std::vector<Matrix>& d_imputations,
                         const RowVector& d_imp_loss, RitsParams& g) {
    const int steps = batch.steps();
    const int bands = p.bands();
    const int hidden = p.hidden();
    Matrix dh = d_h_last;
    Matrix dc = Matrix::Zero(hidden, dh.cols());
    const RowVector d_step_loss = d_imp_loss / static_cast<double>(steps);

    for (int t = steps - 1; t >= 0; --t) {
        const auto i = static_cast<std::size_t>(t);
        const RitsStepCache& s = tape.steps[i];
        const Matrix& x = batch.values[i];
        const Matrix& m = batch.mask[i];
        const Matrix& d = batch.deltas[i];

        // LSTM cell.
        const Matrix d_o = dh.cwiseProduct(s.tanh_c);
        dc.array() += dh.array() * s.gate_o.array() * (1.0 - s.tanh_c.array().square());
        const Matrix a_i = (dc.array() * s.gate_g.array() * s.gate_i.array() * (1.0 - s.gate_i.array())).matrix();
        const Matrix a_f = (dc.array() * s.c_prev.array() * s.gate_f.array() * (1.0 - s.gate_f.array())).matrix();
        const Matrix a_o = (d_o.array() * s.gate_o.array() * (1.0 - s.gate_o.array())).matrix();
        const Matrix a_g = (dc.array() * s.gate_i.array() * (1.0 - s.gate_g.array().square())).matrix();
        Matrix dc_prev = dc.cwiseProduct(s.gate_f);

        g.w_i.noalias() += a_i * s.u.transpose();
        g.w_f.noalias() += a_f * s.u.transpose();
        g.w_o.noalias() += a_o * s.u.transpose();
        g.w_g.noalias() += a_g * s.u.transpose();
        g.b_i += a_i.rowwise().sum();
        g.b_f += a_f.rowwise().sum();
        g.b_o += a_o.rowwise().sum();
        g.b_g += a_g.rowwise().sum();
        Matrix du = p.w_i.transpose() * a_i;
        du.noalias() += p.w_f.transpose() * a_f;
        du.noalias() += p.w_o.transpose() * a_o;
        du.noalias() += p.w_g.transpose() * a_g;
        Matrix dh_dec = du.bottomRows(hidden);

        // Per-entry weight of the masked absolute-error terms.
        const Matrix coef = (m.array().rowwise() * (d_step_loss.array() * s.inv_count.array())).matrix();
        const auto missing = (1.0 - m.array());

        Matrix dc_hat = (missing * du.topRows(bands).array()).matrix();
        if (!d_imputations.empty()) dc_hat += d_imputations[i];
        dc_hat -= coef.cwiseProduct(sign(x - s.c_hat));

        const Matrix d_beta = dc_hat.cwiseProduct(s.z_hat - s.x_hat);
        const Matrix dz_hat = dc_hat.cwiseProduct(s.beta) - coef.cwiseProduct(sign(x - s.z_hat));
        Matrix dx_hat = (dc_hat.array() * (1.0 - s.beta.array())).matrix() - coef.cwiseProduct(sign(x - s.x_hat));

        const Matrix a_beta = (d_beta.array() * s.beta.array() * (1.0 - s.beta.array())).matrix();
        g.w_beta.leftCols(bands).noalias() += a_beta * s.gamma.transpose();
        g.w_beta.rightCols(bands).noalias() += a_beta * m.transpose();
        g.b_beta += a_beta.rowwise().sum();
        const Matrix d_gamma = p.w_beta.leftCols(bands).transpose() * a_beta;

        g.w_z.noalias() += dz_hat * s.x_c.transpose();
        g.b_z += dz_hat.rowwise().sum();
        dx_hat.array() += missing * (p.w_z.transpose() * dz_hat).array();

        g.w_x.noalias() += dx_hat * s.h_dec.transpose();
        g.b_x += dx_hat.rowwise().sum();
        dh_dec.noalias() += p.w_x.transpose() * dx_hat;

        const Matrix a_gamma = decay_backward(d_gamma, s.gamma_pre, s.gamma);
        g.w_gamma.noalias() += a_gamma * d.transpose();
        g.b_gamma += a_gamma.rowwise().sum();

        if (p.hidden_decay()) {
            const Matrix a_gamma_h = decay_backward(dh_dec.cwiseProduct(s.h_prev), s.gamma_h_pre, s.gamma_h);
            g.w_gamma_h.noalias() += a_gamma_h * d.transpose();
            g.b_gamma_h += a_gamma_h.rowwise().sum();
            dh = dh_dec.cwiseProduct(s.gamma_h);
        } else {
            dh = std::move(dh_dec);
        }
        dc = std::move(dc_prev);
    }
    g.zero_feature_diagonal();
}

RitsStepOutput rits_step(const RitsState& state, const Vector& x, const Vector& mask, const Vector& delta,
                         const RitsParams& params) {
    const int bands = params.bands();
    if (x.size() != bands || mask.size() != bands || delta.size() != bands ||
        state.h.size() != params.hidden() || state.c.size() != params.hidden()) {
        fail(ErrorKind::ShapeMismatch, "rits_step inputs do not match the parameter shapes");
    }
    Matrix xs = Matrix::Zero(bands, 1);
    for (int b = 0; b < bands; ++b) xs(b, 0) = mask[b] == 1.0 ? x[b] : 0.0;
    RitsStepCache cache;
    rits_step_batch(xs, mask, delta, state.h, state.c, params, cache);
    return {RitsState{cache.h.col(0), cache.c.col(0)}, cache.c_hat.col(0), cache.loss[0]};
}

RitsForward rits_forward(const SpectralSeries& series, const RitsParams& params) {
    const SpectralSeries* ptr = &series;
    const SeriesBatch batch = make_series_batch(std::span<const SpectralSeries* const>(&ptr, 1));
    RitsTape tape;
    rits_forward_batch(batch, params, tape);
    RitsForward out;
    out.h_last = tape.h_last().col(0);
    out.imputations.resize(series.steps(), series.bands());
    for (int t = 0; t < series.steps(); ++t) {
        out.imputations.row(t) = tape.steps[static_cast<std::size_t>(t)].c_hat.col(0).transpose();
    }
    out.imp_loss = tape.imp_loss()[0];
    return out;
}

}  // namespace stunmix
