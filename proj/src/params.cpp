#include "stunmix/params.hpp"

namespace stunmix {

RitsParams RitsParams::zeros(int bands, int hidden, bool hidden_decay) {
    RitsParams p;
    p.w_gamma = Matrix::Zero(bands, bands);
    p.b_gamma = Matrix::Zero(bands, 1);
    if (hidden_decay) {
        p.w_gamma_h = Matrix::Zero(hidden, bands);
        p.b_gamma_h = Matrix::Zero(hidden, 1);
    }
    p.w_x = Matrix::Zero(bands, hidden);
    p.b_x = Matrix::Zero(bands, 1);
    p.w_z = Matrix::Zero(bands, bands);
    p.b_z = Matrix::Zero(bands, 1);
    p.w_beta = Matrix::Zero(bands, 2 * bands);
    p.b_beta = Matrix::Zero(bands, 1);
    const int in = 2 * bands + hidden;
    for (Matrix* w : {&p.w_i, &p.w_f, &p.w_o, &p.w_g}) *w = Matrix::Zero(hidden, in);
    for (Matrix* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_g}) *b = Matrix::Zero(hidden, 1);
    return p;
}

UnmixerParams UnmixerParams::zeros(const ModelConfig& config) {
    config.validate();
    UnmixerParams p;
    p.config = config;
    p.brits.fwd = RitsParams::zeros(config.bands, config.hidden, config.hidden_decay);
    p.brits.bwd = RitsParams::zeros(config.bands, config.hidden, config.hidden_decay);
    if (config.uses_ancillary()) {
        p.anc_w = Matrix::Zero(config.anc_hidden, config.ancillary_inputs());
        p.anc_b = Matrix::Zero(config.anc_hidden, 1);
    }
    p.head_w = Matrix::Zero(config.classes, config.head_inputs());
    p.head_b = Matrix::Zero(config.classes, 1);
    return p;
}

UnmixerParams UnmixerParams::zeros_like() const {
    UnmixerParams out = *this;
    for_each(out, [](const std::string&, Matrix& m) { m.setZero(); });
    return out;
}

std::size_t UnmixerParams::scalar_count() const {
    std::size_t n = 0;
    for_each(*this, [&n](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
    return n;
}

void UnmixerParams::zero_feature_diagonals() {
    brits.fwd.zero_feature_diagonal();
    brits.bwd.zero_feature_diagonal();
}

void UnmixerParams::add_scaled(const UnmixerParams& other, double scale) {
    auto dst = named_tensors(*this);
    auto src = named_tensors(other);
    for (std::size_t i = 0; i < dst.size(); ++i) *dst[i].value += scale * *src[i].value;
}

std::vector<NamedTensor> named_tensors(UnmixerParams& params) {
    std::vector<NamedTensor> out;
    UnmixerParams::for_each(params, [&out](std::string name, Matrix& m) { out.push_back({std::move(name), &m}); });
    return out;
}

std::vector<ConstNamedTensor> named_tensors(const UnmixerParams& params) {
    std::vector<ConstNamedTensor> out;
    UnmixerParams::for_each(params,
                            [&out](std::string name, const Matrix& m) { out.push_back({std::move(name), &m}); });
    return out;
}

bool is_feature_regression(const std::string& name) { return name.ends_with(".w_z"); }

}  // namespace stunmix
