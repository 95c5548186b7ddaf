#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace wzm {

// Run fn(i) for i in [0, count) on a small work pool. Tasks must be pure
// and write their result by index, so the gathered output is in grid order
// regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
  if (count == 0) return;
  unsigned n = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  n = static_cast<unsigned>(std::min<std::size_t>(n, count));

  if (n == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
}

}  // namespace wzm
