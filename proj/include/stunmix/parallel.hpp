#pragma once

#include <cstddef>
#include <functional>

namespace stunmix {

/// Samples per work chunk. Chunk boundaries never depend on the thread count,
/// and chunk results are reduced in index order, so results are bitwise
/// identical for any number of threads.
inline constexpr std::size_t kChunkSize = 256;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

/// Runs fn(0) .. fn(tasks - 1) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t tasks, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace stunmix
