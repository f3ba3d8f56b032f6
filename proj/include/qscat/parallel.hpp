#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qscat {

// Global switch between the OpenMP kernels and the serial reference path.
// Tests pin this to 1 and compare against the parallel output.
int max_threads();
void set_max_threads(int n);

/// Parallel map over [0, n): f(i) must only touch state owned by iteration i.
/// Runs serially when max_threads() == 1 or OpenMP is unavailable.
template <typename F>
void parallel_for(size_t n, F&& f) {
#ifdef _OPENMP
    if (max_threads() > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
        for (long i = 0; i < static_cast<long>(n); ++i) f(static_cast<size_t>(i));
        return;
    }
#endif
    for (size_t i = 0; i < n; ++i) f(i);
}

}  // namespace qscat
