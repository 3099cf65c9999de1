#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stunmix {

/// Which ancillary feature groups feed the fusion head.
enum class AncillaryUse { None, Geo, Clim, Both };

std::string_view to_string(AncillaryUse use);
AncillaryUse parse_ancillary_use(std::string_view text);

struct ModelConfig {
    int hidden = 64;      // H, recurrent state size
    int anc_hidden = 32;  // A, ancillary branch width
    int classes = 4;      // K
    int steps = 12;       // T
    int bands = 7;        // B
    AncillaryUse use_ancillary = AncillaryUse::Both;
    double lambda_imp = 0.1;
    double lambda_cons = 0.1;
    bool hidden_decay = false;

    /// Half-open range of ancillary feature indices routed into the branch.
    std::pair<std::size_t, std::size_t> ancillary_range() const;
    int ancillary_inputs() const;
    bool uses_ancillary() const { return use_ancillary != AncillaryUse::None; }
    int head_inputs() const { return 2 * hidden + (uses_ancillary() ? anc_hidden : 0); }

    void validate() const;
};

struct TrainConfig {
    int epochs = 200;
    int batch_size = 2048;
    double lr0 = 0.003;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    bool shuffle = true;

    void validate() const;
};

struct SceneConfig {
    int width = 100;
    int height = 100;
    int classes = 4;
    int steps = 12;
    int bands = 7;
    double dirichlet_alpha = 0.5;
    double noise_sigma = 0.02;
    double missing_rate = 0.15;
    bool ancillary_informative = true;
    double ancillary_noise = 0.1;
    double amplitude_scale = 1.0;
    int smoothing_radius = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Ordered `key = value` pairs; `#` starts a comment.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text);

/// Keys absent from `text` keep their value from `base`.
ModelConfig parse_model_config(std::string_view text, const ModelConfig& base = {});
TrainConfig parse_train_config(std::string_view text, const TrainConfig& base = {});
SceneConfig parse_scene_config(std::string_view text, const SceneConfig& base = {});

std::string format_model_config(const ModelConfig& config);
std::string format_train_config(const TrainConfig& config);
std::string format_scene_config(const SceneConfig& config);

}  // namespace stunmix
