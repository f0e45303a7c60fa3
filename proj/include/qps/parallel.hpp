#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace qps {

// Run fn(0..count-1) on `jobs` workers; results land in task-index order, so
// output is independent of scheduling.
template <typename T>
std::vector<T> parallel_map(int count, int jobs, const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) out[std::size_t(i)] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      out[std::size_t(i)] = fn(i);
    }
  };
  std::vector<std::thread> pool;
  int nthreads = std::min(jobs, count);
  pool.reserve(std::size_t(nthreads));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

} // namespace qps
