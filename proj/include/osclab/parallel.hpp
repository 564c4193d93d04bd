#pragma once

// Deterministic parallel map: work items are indexed, results land in
// preallocated slots, so the output is independent of the thread count.

#include <atomic>
#include <thread>
#include <vector>

namespace osclab {

inline int default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

template <class F>
inline void parallel_for(size_t n, int threads, F&& fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  const int use = std::min<size_t>(threads, n);
  pool.reserve(use);
  for (int t = 0; t < use; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace osclab
