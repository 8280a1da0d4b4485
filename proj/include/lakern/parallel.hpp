#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace lakern::detail {

// Static striping over [0, count); fn(i) runs exactly once per index,
// so results are independent of the worker count.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&fn, w, threads, count] {
      for (std::size_t i = w; i < count; i += threads) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace lakern::detail
