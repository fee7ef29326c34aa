#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Thread-count control and order-stable parallel reductions.
//
// Reductions are computed in fixed blocks of 4096 terms: terms are summed
// sequentially within a block and blocks are combined in index order, so the
// floating-point result is bit-identical for every thread count (including
// the serial build).  Only the work distribution changes with threads.

namespace levyfields {

// Number of threads parallel kernels may use.  Defaults to the OpenMP
// runtime's choice; set_max_threads(1) forces serial execution.
int max_threads();
void set_max_threads(int n);

namespace detail {
inline constexpr std::size_t kSumBlock = 4096;
}

// Sum of term(i) for i in [0, n), order-stable as described above.
template <class Term>
auto deterministic_sum(std::size_t n, Term&& term) -> decltype(term(std::size_t{0})) {
    using Value = decltype(term(std::size_t{0}));
    if (n == 0) return Value{};
    const std::size_t nblocks = (n + detail::kSumBlock - 1) / detail::kSumBlock;
    std::vector<Value> partial(nblocks, Value{});
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
#endif
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * detail::kSumBlock;
        const std::size_t end = std::min(begin + detail::kSumBlock, n);
        Value s{};
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    Value total{};
    for (const Value& s : partial) total += s;
    return total;
}

// Parallel loop over [0, n); the body must be safe to run concurrently for
// distinct indices (it may only write state owned by index i).
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        body(static_cast<std::size_t>(i));
}

} // namespace levyfields
