#pragma once

#include <cstdint>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace agcnn {

/// Worker count for parallel regions. Reads AGCNN_THREADS on every call:
/// unset -> all hardware threads, 0 or 1 -> serial reference mode, n -> n.
int resolve_threads();

/// True when AGCNN_THREADS forces the single-threaded reference path.
bool serial_reference_mode();

/// Runs body(i) for i in [0, n). With threads > 1 iterations execute on an
/// OpenMP team; the first exception thrown by any iteration is rethrown on
/// the calling thread. Iterations must write to disjoint state.
template <typename Body>
void parallel_for(std::int64_t n, int threads, Body&& body) {
  if (n <= 0) return;
#ifdef _OPENMP
  if (threads > 1 && n > 1) {
    std::exception_ptr err = nullptr;
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical(agcnn_parallel_for_err)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)threads;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace agcnn
