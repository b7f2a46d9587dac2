#pragma once

#include <functional>

namespace msplat {

/// Caps the number of worker threads used by parallel_for. 0 = hardware
/// concurrency. Results never depend on the thread count: work is split
/// into fixed blocks and reductions happen in block order.
void set_max_threads(int n);
int max_threads();

/// Runs fn(begin, end) over contiguous blocks covering [0, n). The block
/// partition depends only on n, so per-block scratch buffers reduced in
/// block order give bit-identical results for any thread count.
void parallel_for_blocks(int64_t n, const std::function<void(int64_t, int64_t)>& fn);

/// Number of blocks parallel_for_blocks will use for n items.
int block_count(int64_t n);

}  // namespace msplat
