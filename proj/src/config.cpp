#include "stunmix/config.hpp"

#include <functional>

#include "stunmix/data_model.hpp"
#include "stunmix/error.hpp"
#include "stunmix/io.hpp"

namespace stunmix {

std::string_view to_string(AncillaryUse use) {
    switch (use) {
        case AncillaryUse::None: return "none";
        case AncillaryUse::Geo: return "geo";
        case AncillaryUse::Clim: return "clim";
        case AncillaryUse::Both: return "both";
    }
    return "none";
}

AncillaryUse parse_ancillary_use(std::string_view text) {
    if (text == "none") return AncillaryUse::None;
    if (text == "geo") return AncillaryUse::Geo;
    if (text == "clim") return AncillaryUse::Clim;
    if (text == "both") return AncillaryUse::Both;
    fail(ErrorKind::InvalidConfig, "use_ancillary must be one of none, geo, clim, both (got '" +
                                       std::string(text) + "')");
}

std::pair<std::size_t, std::size_t> ModelConfig::ancillary_range() const {
    switch (use_ancillary) {
        case AncillaryUse::None: return {0, 0};
        case AncillaryUse::Geo: return {kGeoBegin, kGeoEnd};
        case AncillaryUse::Clim: return {kClimBegin, kClimEnd};
        case AncillaryUse::Both: return {0, kAncillaryDim};
    }
    return {0, 0};
}

int ModelConfig::ancillary_inputs() const {
    const auto [b, e] = ancillary_range();
    return static_cast<int>(e - b);
}

void ModelConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) fail(ErrorKind::InvalidConfig, what);
    };
    require(hidden >= 1, "H must be >= 1");
    require(anc_hidden >= 1, "A must be >= 1");
    require(classes >= 2, "K must be >= 2");
    require(steps >= 1, "T must be >= 1");
    require(bands >= 1, "B must be >= 1");
    require(lambda_imp >= 0.0, "lambda_imp must be >= 0");
    require(lambda_cons >= 0.0, "lambda_cons must be >= 0");
}

void TrainConfig::validate() const {
    if (epochs < 1) fail(ErrorKind::InvalidConfig, "epochs must be >= 1");
    if (batch_size < 1) fail(ErrorKind::InvalidConfig, "batch_size must be >= 1");
    if (!(lr0 > 0.0)) fail(ErrorKind::InvalidConfig, "lr0 must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        fail(ErrorKind::InvalidConfig, "Adam betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) fail(ErrorKind::InvalidConfig, "adam epsilon must be > 0");
}

void SceneConfig::validate() const {
    if (width < 1 || height < 1) fail(ErrorKind::InvalidConfig, "scene width and height must be >= 1");
    if (classes < 2) fail(ErrorKind::InvalidConfig, "K must be >= 2");
    if (steps < 1 || bands < 1) fail(ErrorKind::InvalidConfig, "T and B must be >= 1");
    if (!(dirichlet_alpha > 0.0)) fail(ErrorKind::InvalidConfig, "dirichlet_alpha must be > 0");
    if (!(noise_sigma >= 0.0)) fail(ErrorKind::InvalidConfig, "noise_sigma must be >= 0");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) fail(ErrorKind::InvalidConfig, "missing_rate must lie in [0, 1)");
    if (!(ancillary_noise >= 0.0)) fail(ErrorKind::InvalidConfig, "ancillary_noise must be >= 0");
    if (!(amplitude_scale >= 0.0)) fail(ErrorKind::InvalidConfig, "amplitude_scale must be >= 0");
    if (smoothing_radius < 0) fail(ErrorKind::InvalidConfig, "smoothing_radius must be >= 0");
}

KeyValues parse_key_values(std::string_view text) {
    KeyValues out;
    int line_no = 0;
    for (auto line : io::lines(text)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = io::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = io::trim(line.substr(0, eq));
        const auto value = io::trim(line.substr(eq + 1));
        if (key.empty()) fail(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

namespace {

using Setter = std::function<void(std::string_view)>;

struct FieldTable {
    std::vector<std::pair<std::vector<std::string>, Setter>> fields;

    void apply(const KeyValues& kv) const {
        for (const auto& [key, value] : kv) {
            const Setter* setter = nullptr;
            for (const auto& [names, s] : fields) {
                for (const auto& n : names) {
                    if (n == key) setter = &s;
                }
            }
            if (!setter) fail(ErrorKind::InvalidConfig, "unknown key '" + key + "'");
            try {
                (*setter)(value);
            } catch (const Error& e) {
                fail(ErrorKind::InvalidConfig, "bad value for key '" + key + "': " + e.what());
            }
        }
    }
};

Setter int_field(int& target) {
    return [&target](std::string_view v) { target = static_cast<int>(io::parse_int(v)); };
}
Setter u64_field(std::uint64_t& target) {
    return [&target](std::string_view v) {
        const long long x = io::parse_int(v);
        if (x < 0) fail(ErrorKind::InvalidConfig, "must be nonnegative");
        target = static_cast<std::uint64_t>(x);
    };
}
Setter double_field(double& target) {
    return [&target](std::string_view v) { target = io::parse_double(v); };
}
Setter bool_field(bool& target) {
    return [&target](std::string_view v) {
        if (v == "on" || v == "true" || v == "1" || v == "yes") {
            target = true;
        } else if (v == "off" || v == "false" || v == "0" || v == "no") {
            target = false;
        } else {
            fail(ErrorKind::InvalidConfig, "expected on/off");
        }
    };
}

}  // namespace

ModelConfig parse_model_config(std::string_view text, const ModelConfig& base) {
    ModelConfig c = base;
    FieldTable table{{
        {{"H", "hidden"}, int_field(c.hidden)},
        {{"A", "anc_hidden"}, int_field(c.anc_hidden)},
        {{"K", "classes"}, int_field(c.classes)},
        {{"T", "steps"}, int_field(c.steps)},
        {{"B", "bands"}, int_field(c.bands)},
        {{"use_ancillary"}, [&c](std::string_view v) { c.use_ancillary = parse_ancillary_use(v); }},
        {{"lambda_imp", "λ_imp"}, double_field(c.lambda_imp)},
        {{"lambda_cons", "λ_cons"}, double_field(c.lambda_cons)},
        {{"hidden_decay"}, bool_field(c.hidden_decay)},
    }};
    table.apply(parse_key_values(text));
    c.validate();
    return c;
}

TrainConfig parse_train_config(std::string_view text, const TrainConfig& base) {
    TrainConfig c = base;
    FieldTable table{{
        {{"epochs"}, int_field(c.epochs)},
        {{"batch_size"}, int_field(c.batch_size)},
        {{"lr0", "lr"}, double_field(c.lr0)},
        {{"seed"}, u64_field(c.seed)},
        {{"beta1"}, double_field(c.beta1)},
        {{"beta2"}, double_field(c.beta2)},
        {{"adam_eps", "eps"}, double_field(c.adam_eps)},
        {{"shuffle"}, bool_field(c.shuffle)},
    }};
    table.apply(parse_key_values(text));
    c.validate();
    return c;
}

SceneConfig parse_scene_config(std::string_view text, const SceneConfig& base) {
    SceneConfig c = base;
    FieldTable table{{
        {{"width"}, int_field(c.width)},
        {{"height"}, int_field(c.height)},
        {{"K", "classes"}, int_field(c.classes)},
        {{"T", "steps"}, int_field(c.steps)},
        {{"B", "bands"}, int_field(c.bands)},
        {{"dirichlet_alpha"}, double_field(c.dirichlet_alpha)},
        {{"noise_sigma"}, double_field(c.noise_sigma)},
        {{"missing_rate"}, double_field(c.missing_rate)},
        {{"ancillary_informative"}, bool_field(c.ancillary_informative)},
        {{"ancillary_noise"}, double_field(c.ancillary_noise)},
        {{"amplitude_scale"}, double_field(c.amplitude_scale)},
        {{"smoothing_radius"}, int_field(c.smoothing_radius)},
        {{"seed"}, u64_field(c.seed)},
    }};
    table.apply(parse_key_values(text));
    c.validate();
    return c;
}

std::string format_model_config(const ModelConfig& c) {
    std::string s;
    s += "H = " + std::to_string(c.hidden) + "\n";
    s += "A = " + std::to_string(c.anc_hidden) + "\n";
    s += "K = " + std::to_string(c.classes) + "\n";
    s += "T = " + std::to_string(c.steps) + "\n";
    s += "B = " + std::to_string(c.bands) + "\n";
    s += "use_ancillary = " + std::string(to_string(c.use_ancillary)) + "\n";
    s += "lambda_imp = " + io::format_double(c.lambda_imp) + "\n";
    s += "lambda_cons = " + io::format_double(c.lambda_cons) + "\n";
    s += std::string("hidden_decay = ") + (c.hidden_decay ? "on" : "off") + "\n";
    return s;
}

std::string format_train_config(const TrainConfig& c) {
    std::string s;
    s += "epochs = " + std::to_string(c.epochs) + "\n";
    s += "batch_size = " + std::to_string(c.batch_size) + "\n";
    s += "lr0 = " + io::format_double(c.lr0) + "\n";
    s += "seed = " + std::to_string(c.seed) + "\n";
    s += "beta1 = " + io::format_double(c.beta1) + "\n";
    s += "beta2 = " + io::format_double(c.beta2) + "\n";
    s += "adam_eps = " + io::format_double(c.adam_eps) + "\n";
    s += std::string("shuffle = ") + (c.shuffle ? "true" : "false") + "\n";
    return s;
}

std::string format_scene_config(const SceneConfig& c) {
    std::string s;
    s += "width = " + std::to_string(c.width) + "\n";
    s += "height = " + std::to_string(c.height) + "\n";
    s += "K = " + std::to_string(c.classes) + "\n";
    s += "T = " + std::to_string(c.steps) + "\n";
    s += "B = " + std::to_string(c.bands) + "\n";
    s += "dirichlet_alpha = " + io::format_double(c.dirichlet_alpha) + "\n";
    s += "noise_sigma = " + io::format_double(c.noise_sigma) + "\n";
    s += "missing_rate = " + io::format_double(c.missing_rate) + "\n";
    s += std::string("ancillary_informative = ") + (c.ancillary_informative ? "true" : "false") + "\n";
    s += "ancillary_noise = " + io::format_double(c.ancillary_noise) + "\n";
    s += "amplitude_scale = " + io::format_double(c.amplitude_scale) + "\n";
    s += "smoothing_radius = " + std::to_string(c.smoothing_radius) + "\n";
    s += "seed = " + std::to_string(c.seed) + "\n";
    return s;
}

}  // namespace stunmix
