#include "msplat/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace msplat {

namespace {
std::atomic<int> g_max_threads{0};

int effective_threads() {
  int n = g_max_threads.load();
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n); }
int max_threads() { return effective_threads(); }

int block_count(int64_t n) {
  // Fixed number of blocks independent of the thread count so that
  // block-ordered reductions are reproducible.
  if (n <= 1) return n <= 0 ? 0 : 1;
  return static_cast<int>(std::min<int64_t>(n, 8));
}

void parallel_for_blocks(int64_t n, const std::function<void(int64_t, int64_t)>& fn) {
  if (n <= 0) return;
  const int blocks = block_count(n);
  const int threads = std::min(effective_threads(), blocks);
  if (threads <= 1) {
    for (int b = 0; b < blocks; ++b) {
      int64_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
      if (lo < hi) fn(lo, hi);
    }
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int b = next.fetch_add(1);
      if (b >= blocks) return;
      int64_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
      if (lo < hi) fn(lo, hi);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads) - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace msplat
