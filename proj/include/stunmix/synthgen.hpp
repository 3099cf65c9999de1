#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "stunmix/config.hpp"
#include "stunmix/data_model.hpp"

namespace stunmix::synth {

/// Pure-class reflectance trajectories: signatures[k] is T x B.
struct EndmemberSet {
    std::vector<Matrix> signatures;

    int classes() const { return static_cast<int>(signatures.size()); }
};

/// signature[k](t, b) = base_k[b] + amp_k[b] * sin(2 pi t / T + phase_k).
EndmemberSet gen_endmembers(int classes, int steps, int bands, std::uint64_t seed, double amplitude_scale = 1.0);

/// Linear mixture of the signatures plus i.i.d. Gaussian noise.
Matrix mix(const EndmemberSet& endmembers, const Vector& abundances, double noise_sigma, std::mt19937_64& rng);

struct Scene {
    Dataset dataset;
    EndmemberSet endmembers;
};

Scene gen_scene(const SceneConfig& config);

/// Plain-text dump: `K T B` header, then for every class T lines of B values.
std::string format_endmembers(const EndmemberSet& endmembers);
EndmemberSet parse_endmembers(std::string_view text);

}  // namespace stunmix::synth
