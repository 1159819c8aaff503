#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pixelarray::detail {

// Splits [0, total) into contiguous blocks, one per worker, and runs
// fn(begin, end) on each. Workers own disjoint output slices, so results do
// not depend on the thread count.
inline void parallel_blocks(std::uint64_t total, int threads,
                            const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
  if (total == 0) return;
  std::uint64_t workers = threads > 1 ? static_cast<std::uint64_t>(threads) : 1;
  if (workers > total) workers = total;
  if (workers == 1) {
    fn(0, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::uint64_t chunk = total / workers;
  std::uint64_t extra = total % workers;
  std::uint64_t begin = 0;
  for (std::uint64_t w = 0; w < workers; ++w) {
    std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
    pool.emplace_back(fn, begin, end);
    begin = end;
  }
  for (auto& t : pool) t.join();
}

// Thread-count resolution: an explicit request wins, then the
// PIXELARRAY_THREADS environment variable, then 1.
inline int resolve_threads(int requested) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("PIXELARRAY_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

}  // namespace pixelarray::detail
