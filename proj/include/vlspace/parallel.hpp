#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

namespace vls {

/// Runs body(i) for i in [0, count). Iterations must only write to
/// slot-i outputs; callers reduce the slots in index order afterwards so
/// results do not depend on scheduling. If iterations throw, the exception
/// of the lowest failing index is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const auto n = static_cast<long long>(count);
  std::exception_ptr first;
  long long first_index = std::numeric_limits<long long>::max();
  std::mutex guard;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

inline void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace vls
