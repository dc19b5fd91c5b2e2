#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rarevel {

/// Worker cap: RAREVEL_THREADS when set, hardware concurrency otherwise.
inline int max_workers() {
  if (const char* env = std::getenv("RAREVEL_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Static contiguous partition of [0, n) over the workers. Each index is
/// processed by exactly one thread and every per-index computation keeps its
/// own summation order, so results are identical for any worker count.
/// The first exception thrown by any worker is rethrown after the join.
/// fn(begin, end, worker_id).
inline void parallel_for(long n, const std::function<void(long, long, int)>& fn) {
  const int nw = static_cast<int>(std::min<long>(max_workers(), std::max<long>(n, 1)));
  if (nw <= 1 || n < 2) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nw - 1);
  const long chunk = (n + nw - 1) / nw;
  std::vector<std::exception_ptr> errs(nw);
  for (int t = 1; t < nw; ++t) {
    const long b = t * chunk, e = std::min(n, (t + 1) * chunk);
    if (b >= e) continue;
    pool.emplace_back([=, &fn, &errs] {
      try {
        fn(b, e, t);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  try {
    fn(0, std::min(n, chunk), 0);
  } catch (...) {
    errs[0] = std::current_exception();
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

} // namespace rarevel
