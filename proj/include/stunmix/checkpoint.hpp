#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "stunmix/config.hpp"
#include "stunmix/trainer.hpp"

namespace stunmix {

// Binary layout, all integers and floats little-endian:
//   magic "STUNMXCK" | u32 version
//   str model config (key = value text) | str train config
//   u32 n | n x block                      parameters
//   u32 n | n x block                      normalization statistics
//   i64 adam step | u32 n | n x (block m, block v)
//   i64 completed epochs
//   u32 n | n x (i64 epoch, 8 x f64)       history, NaN for undefined metrics
// where str = u64 length + bytes and block = str name, u64 rows, u64 cols,
// rows*cols f64 in row-major order.

inline constexpr std::string_view kCheckpointMagic = "STUNMXCK";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    TrainConfig train;
    TrainState state;  // state.params.config is the model configuration

    const ModelConfig& model() const { return state.params.config; }
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace stunmix
