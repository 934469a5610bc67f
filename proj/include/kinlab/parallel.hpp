#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kinlab {

/// Evaluates f(i) for i in [0, n) on `workers` threads and returns the results
/// in index order. Work items are independent, so the output does not depend
/// on the worker count.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int workers, F&& f) {
  std::vector<T> out(n);
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace kinlab
