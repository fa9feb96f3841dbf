#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace maternsim {

/// Pairwise (cascade) summation. Deterministic for a fixed input order and
/// independent of how the values were produced across threads.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;        // sample standard deviation
  double std_error = 0.0; // sd / sqrt(n)
  std::size_t n = 0;
};

inline MeanSd mean_sd(std::span<const double> xs) {
  MeanSd out;
  out.n = xs.size();
  if (xs.empty()) return out;
  out.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - out.mean;
    sq[i] = d * d;
  }
  out.sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size() - 1));
  out.std_error = out.sd / std::sqrt(static_cast<double>(xs.size()));
  return out;
}

/// Runs fn(i) for i in [0, n). Each index must write only to its own slot of
/// any shared output so results do not depend on the thread count.
inline void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (n_threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min<std::size_t>(std::min<int>(n_threads, hw ? hw : 2), n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace maternsim
