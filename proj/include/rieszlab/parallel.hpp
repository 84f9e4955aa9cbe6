#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace rieszlab {

/// Worker cap: RIESZ_LAB_THREADS if set, else hardware concurrency.
inline int max_threads() {
  static const int cached = [] {
    if (const char* env = std::getenv("RIESZ_LAB_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
  }();
  return cached;
}

/// Runs f(i) for i in [0, n). Each index is computed exactly once; callers
/// must write results into per-index slots and reduce sequentially afterwards
/// so that the outcome is independent of the thread count.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  int workers = std::min<std::size_t>(std::size_t(max_threads()), n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers - 1));
  for (int t = 0; t + 1 < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace rieszlab
