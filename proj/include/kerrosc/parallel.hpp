#pragma once
#include <cstdlib>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <omp.h>

namespace kerrosc {

/// Worker count resolution: explicit value > 0 wins, otherwise the
/// KERROSC_WORKERS environment variable, otherwise all hardware threads.
inline int resolve_workers(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("KERROSC_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return omp_get_max_threads();
}

/// Run fn(i) for i in [0, n). workers == 1 is the serial reference path;
/// workers > 1 dispatches the same per-index code over an OpenMP pool, so
/// results are bitwise identical between the two paths. Exceptions thrown by
/// fn are captured and rethrown (first one wins) after the loop completes.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn)
{
    workers = resolve_workers(workers);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; i++)
            fn(i);
        return;
    }
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (long long i = 0; i < (long long)n; i++) {
        try {
            fn((std::size_t)i);
        } catch (...) {
#pragma omp critical(kerrosc_parallel_for_err)
            if (!first_error)
                first_error = std::current_exception();
        }
    }
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace kerrosc
