#ifndef TRIPOSE_PARALLEL_H_
#define TRIPOSE_PARALLEL_H_

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tripose {

// Runs fn(i) for i in [0, n). threads == 1 selects the serial reference
// path; threads == 0 uses the OpenMP default. Bodies must only write to
// per-index state so both paths produce identical results.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
#ifdef _OPENMP
    if (threads != 1) {
        const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads( \
        threads > 0 ? threads : omp_get_max_threads())
        for (long i = 0; i < ln; ++i) fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)threads;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace tripose

#endif  // TRIPOSE_PARALLEL_H_
