#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace steklov {

// Worker count: STEKLOV_LAB_THREADS when set and positive, else hardware concurrency.
inline int thread_limit() {
  if (const char* env = std::getenv("STEKLOV_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on contiguous chunks of at least `grain`
// indices. Callers write to disjoint slots, so results do not depend on the
// thread count.
template <typename Body>
void parallel_for(int count, Body&& body, int grain = 64) {
  const int workers = std::min(thread_limit(), std::max(1, count / std::max(1, grain)));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = static_cast<int>(static_cast<long>(count) * w / workers);
    const int end = static_cast<int>(static_cast<long>(count) * (w + 1) / workers);
    pool.emplace_back([begin, end, &body] {
      for (int i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace steklov
