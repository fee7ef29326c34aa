#include "levyfields/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace levyfields {

namespace {
std::atomic<int> g_max_threads{0}; // 0 = not set, use the runtime default
}

int max_threads() {
    const int configured = g_max_threads.load(std::memory_order_relaxed);
    if (configured > 0) return configured;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_max_threads(int n) { g_max_threads.store(std::max(0, n), std::memory_order_relaxed); }

} // namespace levyfields
