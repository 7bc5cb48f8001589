#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace bforge {

/// Execution mode for the data-parallel kernels. Serial is the reference
/// path; both modes must produce bit-identical results.
enum class Exec { Serial, Parallel };

/// Runs f(i) for i in [0, n). In Parallel mode iterations are spread over
/// OpenMP threads (never nested inside an enclosing parallel region). The
/// exception from the lowest failing index is rethrown after the join.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f, int threads = 0) {
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  if (exec == Exec::Serial || n < 2 || nthreads < 2 || omp_in_parallel()) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (long long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace bforge
