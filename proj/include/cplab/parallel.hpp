#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace cplab {

// Runs fn(i) for i in [0, count) on a pool of `workers` threads. Callers
// write into per-index slots and merge in index order afterwards, so results
// do not depend on scheduling or worker count.
inline void parallelFor(long count, int workers, const std::function<void(long)>& fn) {
  if (count <= 0) return;
  if (workers <= 1 || count == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::atomic_flag errorLock = ATOMIC_FLAG_INIT;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!errorLock.test_and_set()) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  const long nw = std::min<long>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nw));
  for (long t = 0; t < nw; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace cplab
