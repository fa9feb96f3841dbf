#include "maternsim/rng.hpp"

#include <stdexcept>

namespace maternsim {

std::uint64_t RngStream::next_poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("Poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Knuth product method.
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = next_uniform();
    while (prod > limit) {
      ++k;
      prod *= next_uniform();
    }
    return k;
  }
  // PTRS transformed rejection (Hormann 1993, algorithm PTRS).
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mu = std::log(mean);
  for (;;) {
    const double u = next_uniform() - 0.5;
    const double v = next_uniform();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * log_mu - mean - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
  }
}

}  // namespace maternsim
