#pragma once

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace neurobeat {

// Runs fn(i) for i in [0, n) split into contiguous chunks, one per worker.
// Each index is processed exactly once by exactly one worker, so the result
// is deterministic whenever the iterations are independent. threads <= 1
// runs inline.
template <typename Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  if (n <= 0) return;
  long workers = std::clamp<long>(threads, 1, n);
  if (workers == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  long chunk = (n + workers - 1) / workers;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (long w = 0; w < workers; ++w) {
    long lo = w * chunk;
    long hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn, &first_error, &error_mutex] {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Worker count resolution: explicit request wins, otherwise the
// NEUROBEAT_THREADS environment variable, otherwise machine parallelism.
int resolve_threads(int requested);

}  // namespace neurobeat
