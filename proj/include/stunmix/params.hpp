#pragma once

#include <string>
#include <vector>

#include "stunmix/config.hpp"
#include "stunmix/data_model.hpp"

namespace stunmix {

// All weight matrices are stored output x input and applied as W * x.
// Bias vectors are n x 1 matrices so every tensor shares one type.

/// Weights of one unidirectional recurrent-imputation cell.
struct RitsParams {
    Matrix w_gamma, b_gamma;      // B x B, B: input temporal decay
    Matrix w_gamma_h, b_gamma_h;  // H x B, H: hidden decay (empty unless enabled)
    Matrix w_x, b_x;              // B x H, B: history regression
    Matrix w_z, b_z;              // B x B with zero diagonal, B: feature regression
    Matrix w_beta, b_beta;        // B x 2B, B: combining weights over [gamma; mask]
    Matrix w_i, w_f, w_o, w_g;    // H x (2B + H): LSTM gates over [complement; mask; h]
    Matrix b_i, b_f, b_o, b_g;    // H

    static RitsParams zeros(int bands, int hidden, bool hidden_decay);

    int bands() const { return static_cast<int>(w_gamma.rows()); }
    int hidden() const { return static_cast<int>(w_i.rows()); }
    bool hidden_decay() const { return w_gamma_h.size() > 0; }

    void zero_feature_diagonal() { w_z.diagonal().setZero(); }

    template <class Self, class Fn>
    static void for_each(Self& self, Fn&& fn) {
        fn("w_gamma", self.w_gamma);
        fn("b_gamma", self.b_gamma);
        if (self.w_gamma_h.size() > 0) {
            fn("w_gamma_h", self.w_gamma_h);
            fn("b_gamma_h", self.b_gamma_h);
        }
        fn("w_x", self.w_x);
        fn("b_x", self.b_x);
        fn("w_z", self.w_z);
        fn("b_z", self.b_z);
        fn("w_beta", self.w_beta);
        fn("b_beta", self.b_beta);
        fn("w_i", self.w_i);
        fn("w_f", self.w_f);
        fn("w_o", self.w_o);
        fn("w_g", self.w_g);
        fn("b_i", self.b_i);
        fn("b_f", self.b_f);
        fn("b_o", self.b_o);
        fn("b_g", self.b_g);
    }
};

struct BritsParams {
    RitsParams fwd;
    RitsParams bwd;
};

/// Full two-branch network plus the configuration that shaped it.
struct UnmixerParams {
    ModelConfig config;
    BritsParams brits;
    Matrix anc_w, anc_b;    // A x n_anc, A (empty when ancillary is unused)
    Matrix head_w, head_b;  // K x (2H [+ A]), K

    static UnmixerParams zeros(const ModelConfig& config);

    template <class Self, class Fn>
    static void for_each(Self& self, Fn&& fn) {
        RitsParams::for_each(self.brits.fwd, [&](const char* n, auto& m) { fn(std::string("brits.fwd.") + n, m); });
        RitsParams::for_each(self.brits.bwd, [&](const char* n, auto& m) { fn(std::string("brits.bwd.") + n, m); });
        if (self.anc_w.size() > 0) {
            fn(std::string("anc.w"), self.anc_w);
            fn(std::string("anc.b"), self.anc_b);
        }
        fn(std::string("head.w"), self.head_w);
        fn(std::string("head.b"), self.head_b);
    }

    /// Zero-valued tensors of identical shapes; used as gradient accumulators.
    UnmixerParams zeros_like() const;
    std::size_t scalar_count() const;
    void zero_feature_diagonals();
    void add_scaled(const UnmixerParams& other, double scale);
};

struct NamedTensor {
    std::string name;
    Matrix* value;
};

struct ConstNamedTensor {
    std::string name;
    const Matrix* value;
};

std::vector<NamedTensor> named_tensors(UnmixerParams& params);
std::vector<ConstNamedTensor> named_tensors(const UnmixerParams& params);

/// True when `name` addresses the constrained-zero diagonal of a feature regression.
bool is_feature_regression(const std::string& name);

}  // namespace stunmix
