#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace memseconv {

inline int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(worker_index, y_begin, y_end) over a static partition of
/// [0, height) rows. Workers own disjoint contiguous row ranges, so any
/// per-pixel computation that writes only its own rows is bit-identical to
/// the sequential run regardless of the thread count.
inline void parallel_for_rows(int height, int threads,
                              const std::function<void(int, int, int)>& fn) {
  threads = std::clamp(threads, 1, height);
  if (threads == 1) {
    fn(0, 0, height);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int base = height / threads;
  const int extra = height % threads;
  int y = 0;
  for (int t = 0; t < threads; ++t) {
    const int rows = base + (t < extra ? 1 : 0);
    pool.emplace_back(fn, t, y, y + rows);
    y += rows;
  }
  for (auto& th : pool) th.join();
}

}  // namespace memseconv
