#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stunmix/data_model.hpp"

namespace stunmix {

/// 18 km x 15 km at 460 m per pixel, about 1250 pixels per block.
inline constexpr int kDefaultBlockWidth = 39;
inline constexpr int kDefaultBlockHeight = 32;
inline constexpr double kDefaultTrainRatio = 0.8;

struct BlockId {
    int bx = 0;
    int by = 0;

    auto operator<=>(const BlockId&) const = default;
    std::string str() const { return std::to_string(bx) + "_" + std::to_string(by); }
};

enum class SplitLabel { Train, Test };

std::string_view to_string(SplitLabel label);

/// Train/test sample indices into a dataset.
struct DataSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct BlockAssignment {
    int block_w = kDefaultBlockWidth;
    int block_h = kDefaultBlockHeight;
    std::uint64_t seed = 0;
    std::vector<BlockId> sample_blocks;          // one per sample
    std::map<BlockId, SplitLabel> block_labels;  // one per distinct block

    SplitLabel label_of(std::size_t sample) const { return block_labels.at(sample_blocks[sample]); }
    DataSplit split() const;
    std::size_t train_blocks() const;
};

std::vector<BlockId> make_blocks(std::span<const Sample> samples, int block_w, int block_h);

/// Shuffles the distinct blocks and sends the first ceil(ratio * n) to train.
/// Throws TooFewBlocks when fewer than two blocks exist or no test block would remain.
BlockAssignment assign_split(const std::vector<BlockId>& sample_blocks, double ratio, std::uint64_t seed);

BlockAssignment block_split(const Dataset& dataset, int block_w, int block_h, double ratio, std::uint64_t seed);

/// `pixel_id,block_id,split` rows in dataset order.
std::string format_split_csv(const Dataset& dataset, const BlockAssignment& assignment);
/// Maps a split file onto `dataset` by pixel_id. Every sample must be listed.
DataSplit parse_split_csv(std::string_view text, const Dataset& dataset);

}  // namespace stunmix
