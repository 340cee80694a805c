#include "agcnn/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace agcnn {

static int read_env_threads() {
  const char* s = std::getenv("AGCNN_THREADS");
  if (!s || !*s) return -1;
  try {
    return std::max(0, std::stoi(s));
  } catch (...) {
    return -1;
  }
}

int resolve_threads() {
  int env = read_env_threads();
  if (env == 0) return 1;  // reference mode
  if (env > 0) return env;
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return std::max(1u, std::thread::hardware_concurrency());
#endif
}

bool serial_reference_mode() { return read_env_threads() == 0; }

}  // namespace agcnn
