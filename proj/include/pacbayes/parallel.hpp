#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pacbayes {

/// Number of OpenMP threads available (1 when built without OpenMP).
inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, n).
///
/// threads == 1 takes the serial reference path (a plain loop, no OpenMP
/// region); threads == 0 uses all available threads. Work items must be
/// independent and write only to their own slots; with per-item derived
/// RNG streams the parallel and serial paths produce identical results.
template <class F>
void parallel_for(std::int64_t n, int threads, F&& body) {
  if (threads == 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  std::exception_ptr error;
  std::mutex error_mutex;
  const int num_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(num_threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace pacbayes
