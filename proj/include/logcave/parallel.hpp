#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace logcave {

/// Selects the OpenMP kernel or its serial reference. Both paths visit the
/// same work items with the same random substreams, so results agree bit for
/// bit; only wall-clock differs.
enum class Execution { Serial, Parallel };

/// Runs body(i) for i in [0, count). Exceptions thrown inside the parallel
/// region are captured and the first one is rethrown after the join.
template <typename Body>
void parallel_for(Execution policy, std::size_t count, Body&& body) {
  if (policy == Execution::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    {
      std::lock_guard<std::mutex> lock(guard);
      if (failure) continue;
    }
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace logcave
