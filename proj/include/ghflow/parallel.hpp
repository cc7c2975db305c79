#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace ghflow {

// Static-free parallel loop. Each index is processed exactly once; workers
// write only to disjoint, preallocated slots, so results are independent of
// worker count and interleaving.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  if (n <= 0) return;
  int workers = jobs;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  if (workers > n) workers = n;
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ghflow
