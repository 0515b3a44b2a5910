// Order-independent parallel replication.

#ifndef LOTEX_PARALLEL_HPP
#define LOTEX_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace lotex {

namespace detail {
inline std::atomic<int>& worker_count_slot() {
  static std::atomic<int> slot{1};
  return slot;
}
}  // namespace detail

/// Number of worker threads used by `parallel_map` when none is given.
inline int worker_count() { return detail::worker_count_slot().load(); }
inline void set_worker_count(int jobs) { detail::worker_count_slot().store(std::max(1, jobs)); }

/// Evaluates `fn(i)` for i in [0, n) and returns the results indexed by i.
/// Results are a function of i alone, so the output is identical for any
/// number of workers. The first exception thrown by any call is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn, int jobs = 0) {
  using T = std::decay_t<std::invoke_result_t<Fn&, std::size_t>>;
  std::vector<T> out(n);
  if (jobs <= 0) jobs = worker_count();
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace lotex

#endif  // LOTEX_PARALLEL_HPP
