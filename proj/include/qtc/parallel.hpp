#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace qtc {

/// Worker count for range-partitioned scans. 0 means "one per logical CPU".
struct Parallelism {
  unsigned jobs = 1;

  unsigned resolved() const {
    if (jobs != 0) return jobs;
    return std::max(1U, std::thread::hardware_concurrency());
  }
};

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on each,
/// one chunk per worker. The first exception thrown by any worker is
/// rethrown on the calling thread.
inline void parallel_for(std::size_t n, Parallelism par,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(par.resolved(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Maps fn over items in parallel, preserving order.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, Parallelism par, Fn fn) {
  using R = decltype(fn(items.front()));
  static_assert(!std::is_same_v<R, bool>, "vector<bool> is not safe for concurrent writes");
  std::vector<R> out(items.size());
  parallel_for(items.size(), par, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = fn(items[i]);
  });
  return out;
}

}  // namespace qtc
