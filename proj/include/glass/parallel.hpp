#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace glass {

/// Worker count resolution: explicit request > GLASS_COMPLEXITY_WORKERS > hardware.
inline int resolve_workers(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GLASS_COMPLEXITY_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs f(i) for i in [0, n). Work is split into contiguous blocks; results
/// must be written to per-index storage so the outcome is identical for any
/// worker count.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
    workers = std::max(1, workers);
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::size_t nthreads = std::min<std::size_t>(workers, n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t tid = 0; tid < nthreads; ++tid) {
        std::size_t lo = tid * chunk, hi = std::min(n, lo + chunk);
        pool.emplace_back([&, lo, hi, tid] {
            try {
                for (std::size_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                errors[tid] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace glass
