#pragma once

#include <algorithm>
#include <thread>
#include <vector>

#include "mixlearn/types.hpp"

namespace mixlearn {

// Static block partition of [0, n) over `workers` threads. Bodies must write
// only to their own index slots; callers reduce the filled arrays serially,
// so results are identical for every worker count.
template <class F>
void parallel_for(Index n, int workers, F&& body) {
  if (workers <= 1 || n < 2) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  const int t = static_cast<int>(std::min<Index>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int w = 0; w < t; ++w) {
    const Index lo = n * w / t;
    const Index hi = n * (w + 1) / t;
    pool.emplace_back([lo, hi, &body] {
      for (Index i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace mixlearn
