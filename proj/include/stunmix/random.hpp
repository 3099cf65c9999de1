#pragma once

#include <cstdint>
#include <random>

namespace stunmix {

/// Independent generator for (seed, stream, index). Streams separate the uses
/// of one user seed; the index gives per-pixel or per-epoch substreams so
/// results do not depend on evaluation order.
inline std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace stunmix
