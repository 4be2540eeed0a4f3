#include "rayleigh/reduce.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace rayleigh {

namespace {

constexpr std::size_t kLeaf = 32;

double sum_range(const double* xs, std::size_t n) {
  if (n <= kLeaf) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += xs[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return sum_range(xs, half) + sum_range(xs + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return sum_range(xs.data(), xs.size()); }

int worker_threads() {
  static const int cached = [] {
    const unsigned hw = std::thread::hardware_concurrency();
    int n = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("RAYLEIGH_WATCH_THREADS")) {
      const int cap = std::atoi(env);
      if (cap >= 1) n = std::min(n, cap);
    }
    return n;
  }();
  return cached;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = static_cast<std::size_t>(worker_threads());
  if (workers <= 1 || n < 4 * kLeaf) {
    body(0, n);
    return;
  }
  const std::size_t chunks = std::min(workers, n);
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t lo = step; lo < n; lo += step) pool.emplace_back(body, lo, std::min(n, lo + step));
  body(0, std::min(n, step));
  for (auto& t : pool) t.join();
}

}  // namespace rayleigh
