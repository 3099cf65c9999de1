#include "stunmix/spatial_split.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "stunmix/error.hpp"
#include "stunmix/io.hpp"

namespace stunmix {

std::string_view to_string(SplitLabel label) { return label == SplitLabel::Train ? "train" : "test"; }

DataSplit BlockAssignment::split() const {
    DataSplit out;
    for (std::size_t i = 0; i < sample_blocks.size(); ++i) {
        (label_of(i) == SplitLabel::Train ? out.train : out.test).push_back(i);
    }
    return out;
}

std::size_t BlockAssignment::train_blocks() const {
    return static_cast<std::size_t>(std::count_if(block_labels.begin(), block_labels.end(),
                                                  [](const auto& kv) { return kv.second == SplitLabel::Train; }));
}

std::vector<BlockId> make_blocks(std::span<const Sample> samples, int block_w, int block_h) {
    if (block_w < 1 || block_h < 1) fail(ErrorKind::InvalidArgument, "block dimensions must be >= 1");
    std::vector<BlockId> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.grid_x < 0 || s.grid_y < 0) fail(ErrorKind::InvalidArgument, "negative grid coordinate");
        out.push_back({s.grid_x / block_w, s.grid_y / block_h});
    }
    return out;
}

BlockAssignment assign_split(const std::vector<BlockId>& sample_blocks, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) fail(ErrorKind::InvalidArgument, "split ratio must lie in (0, 1)");
    std::vector<BlockId> blocks = sample_blocks;
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    const std::size_t n = blocks.size();
    if (n < 2) fail(ErrorKind::TooFewBlocks, "need at least 2 blocks, found " + std::to_string(n));

    // Guard against products such as 0.7 * 10 = 7.000000000000001.
    const auto n_train = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
    if (n_train >= n) {
        fail(ErrorKind::TooFewBlocks, std::to_string(n) + " blocks leave no test block at ratio " +
                                          io::format_double(ratio));
    }

    std::mt19937_64 rng(seed);
    std::shuffle(blocks.begin(), blocks.end(), rng);

    BlockAssignment out;
    out.seed = seed;
    out.sample_blocks = sample_blocks;
    for (std::size_t i = 0; i < n; ++i) out.block_labels[blocks[i]] = i < n_train ? SplitLabel::Train : SplitLabel::Test;
    return out;
}

BlockAssignment block_split(const Dataset& dataset, int block_w, int block_h, double ratio, std::uint64_t seed) {
    BlockAssignment a = assign_split(make_blocks(dataset.samples(), block_w, block_h), ratio, seed);
    a.block_w = block_w;
    a.block_h = block_h;
    return a;
}

std::string format_split_csv(const Dataset& dataset, const BlockAssignment& assignment) {
    if (assignment.sample_blocks.size() != dataset.size()) {
        fail(ErrorKind::AlignmentMismatch, "block assignment does not cover the dataset");
    }
    std::string out = "pixel_id,block_id,split\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out += dataset[i].pixel_id + ',' + assignment.sample_blocks[i].str() + ',' +
               std::string(to_string(assignment.label_of(i))) + '\n';
    }
    return out;
}

DataSplit parse_split_csv(std::string_view text, const Dataset& dataset) {
    const auto rows = io::lines(text);
    if (rows.empty() || rows.front() != "pixel_id,block_id,split") {
        fail(ErrorKind::Format, "split CSV must start with 'pixel_id,block_id,split'");
    }
    std::unordered_map<std::string, SplitLabel> labels;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto cells = io::split(rows[r], ',');
        if (cells.size() != 3) fail(ErrorKind::Format, "split row " + std::to_string(r + 1) + " needs 3 cells");
        SplitLabel label;
        if (cells[2] == "train") {
            label = SplitLabel::Train;
        } else if (cells[2] == "test") {
            label = SplitLabel::Test;
        } else {
            fail(ErrorKind::Format, "split label must be train or test, got '" + std::string(cells[2]) + "'");
        }
        if (!labels.emplace(std::string(cells[0]), label).second) {
            fail(ErrorKind::Format, "pixel '" + std::string(cells[0]) + "' listed twice in split file");
        }
    }
    DataSplit out;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto it = labels.find(dataset[i].pixel_id);
        if (it == labels.end()) fail(ErrorKind::AlignmentMismatch, "pixel '" + dataset[i].pixel_id + "' missing from split");
        (it->second == SplitLabel::Train ? out.train : out.test).push_back(i);
    }
    return out;
}

}  // namespace stunmix
