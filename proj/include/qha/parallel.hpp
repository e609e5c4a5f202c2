#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace qha {

namespace detail {
inline std::atomic<int> &thread_setting() {
  static std::atomic<int> n{0};
  return n;
}
inline bool &inside_worker() {
  thread_local bool flag = false;
  return flag;
}
} // namespace detail

/// Worker count used by parallel_for. 0 means "read QHA_THREADS, else 1".
inline void set_num_threads(int n) { detail::thread_setting() = std::max(0, n); }

inline int num_threads() {
  if (int n = detail::thread_setting(); n > 0)
    return n;
  if (const char *env = std::getenv("QHA_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
    }
  }
  return 1;
}

/// Runs f(i) for i in [0, count) on a static block partition. Each index is
/// handled by exactly one worker, so results do not depend on the thread
/// count as long as f(i) only writes to slots owned by i. Nested calls from
/// inside a worker run serially.
template <class F> void parallel_for(std::size_t count, F &&f) {
  const std::size_t workers =
      detail::inside_worker() ? 1 : std::min<std::size_t>(static_cast<std::size_t>(num_threads()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::inside_worker() = true;
      try {
        const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i)
          f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool)
    t.join();
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace qha
