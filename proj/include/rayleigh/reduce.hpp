#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace rayleigh {

// Pairwise summation over a fixed recursion tree. The result depends only on
// the contents of xs, never on thread count or scheduling.
double pairwise_sum(std::span<const double> xs);

// Worker count: hardware concurrency capped by RAYLEIGH_WATCH_THREADS.
int worker_threads();

// Runs body(lo, hi) over a contiguous partition of [0, n), possibly on
// several threads. Ranges are disjoint; body must not reduce across them.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace rayleigh
