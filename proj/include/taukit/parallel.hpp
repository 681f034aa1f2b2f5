#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace taukit {

/// Runs body(i) for i in [0, n) across threads with static chunking.
/// Callers make results schedule-independent by writing to per-index slots
/// and deriving any randomness from the index, not the thread.
template <class F>
void parallel_for(std::int64_t n, F&& body, unsigned threads = 0) {
  if (n <= 0) return;
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::int64_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::int64_t begin = t * chunk;
    const std::int64_t end = std::min<std::int64_t>(begin + chunk, n);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (std::int64_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace taukit
