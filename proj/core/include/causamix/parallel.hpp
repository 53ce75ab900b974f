#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace causamix {

// Worker count from the CAUSAMIX_WORKERS environment variable, falling back
// to the hardware concurrency; always at least 1.
inline int worker_count() {
  if (const char* env = std::getenv("CAUSAMIX_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(0..n-1), striped across `workers` threads (0 means worker_count()).
// With a single worker the calls happen inline on the calling thread.
inline void parallel_for(int n, int workers,
                         const std::function<void(int)>& fn) {
  if (workers <= 0) workers = worker_count();
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace causamix
