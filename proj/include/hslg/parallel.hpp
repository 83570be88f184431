#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace hslg {

/// How replica loops run. `serial` is the reference path the tests compare
/// the OpenMP path against; both produce identical, replica-indexed output.
enum class Execution { serial, parallel };

inline void set_worker_count(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

inline int worker_count() { return omp_get_max_threads(); }

/// Evaluates fn(i) for i in [0, count) and returns the results in index order.
/// Each call must depend only on i (typically through RngState(seed, i)), so
/// the output does not depend on the schedule or the number of threads.
template <class Fn>
auto map_replicas(std::size_t count, Fn&& fn, Execution ex = Execution::parallel)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Result> out(count);
  if (ex == Execution::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace hslg
