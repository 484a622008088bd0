#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace nehs {

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
// so workers that only write their own indices produce results independent
// of `threads`. Reductions stay with the caller.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(threads - 1);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 1; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(n, chunk));
  for (auto& w : workers) w.join();
}

}  // namespace nehs
