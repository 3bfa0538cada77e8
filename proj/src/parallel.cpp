#include "cmsbudget/parallel.hpp"

#include <algorithm>
#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cmsbudget::parallel {

namespace {
std::atomic<int> g_threads{0};  // 0 = not set yet
}

int hardware_threads() {
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

int threads() {
  const int n = g_threads.load(std::memory_order_relaxed);
  return n > 0 ? n : hardware_threads();
}

void set_threads(int n) { g_threads.store(std::max(1, n), std::memory_order_relaxed); }

}  // namespace cmsbudget::parallel
