#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace q4f {

/// Runs task(i) for i in [0, count) on up to `workers` threads.
///
/// Tasks are claimed dynamically, so callers must make each task write only
/// to its own slot; any reduction happens afterwards in index order. The
/// first exception thrown by a task is rethrown on the calling thread.
template <typename Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
  const std::size_t n_threads = std::min<std::size_t>(std::max(1U, workers), count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count, std::memory_order_relaxed);
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace q4f
