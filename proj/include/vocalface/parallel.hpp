#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vf {

// Thread count used by the batch-parallel loops. All loops use a static
// partition and reduce per-thread buffers in thread order, so results are
// bit-identical across runs for a fixed thread count.
inline int& thread_count_ref() {
#ifdef _OPENMP
  static int n = omp_get_max_threads();
#else
  static int n = 1;
#endif
  return n;
}

inline void set_threads(int n) {
  if (n < 1) n = 1;
  thread_count_ref() = n;
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
}

inline int threads() { return thread_count_ref(); }

inline int this_thread() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

}  // namespace vf
