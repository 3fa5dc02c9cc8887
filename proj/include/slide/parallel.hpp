#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace slide {

// Runs fn(idx) for idx in [begin, end) on up to num_threads workers pulling
// from a shared counter. fn must not touch shared mutable state; results go
// into per-index slots so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(int begin, int end, int num_threads, Fn&& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  if (num_threads <= 1 || count == 1) {
    for (int idx = begin; idx < end; ++idx) fn(idx);
    return;
  }
  const int workers = std::min(num_threads, count);
  std::atomic<int> next{begin};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        const int idx = next.fetch_add(1);
        if (idx >= end) return;
        try {
          fn(idx);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace slide
