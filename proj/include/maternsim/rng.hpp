#pragma once

#include <cmath>
#include <cstdint>

namespace maternsim {

namespace detail {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

/// Counter-based splittable random stream.
///
/// Output i of a stream with key k is mix64(k + (i+1)*golden), i.e. SplitMix64
/// seeded by the key. Streams are value types: copying a stream replays it.
/// Derivation hashes (key, id) into a fresh key, so replicate streams can be
/// created independently on any thread without coordination, and identical
/// (master_seed, stream_index) pairs reproduce identical sequences bit for bit.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
      : key_(derive_key(derive_key(master_seed ^ 0x6D61746572ULL, stream_index), 0x73696DULL)),
        counter_(0) {}

  /// Deterministic child stream; distinct ids give (statistically) independent
  /// streams.
  RngStream derive(std::uint64_t id) const {
    RngStream s;
    s.key_ = derive_key(key_, id);
    s.counter_ = 0;
    s.have_spare_normal_ = false;
    return s;
  }

  std::uint64_t next_u64() {
    return detail::mix64(key_ + (++counter_) * detail::kGolden);
  }

  /// Uniform on the open interval (0,1); never returns 0 or 1, so logs and
  /// reciprocals are safe.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  /// Standard normal via Box-Muller (deterministic, platform-independent).
  double next_normal() {
    if (have_spare_normal_) {
      have_spare_normal_ = false;
      return spare_normal_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_normal_ = r * std::sin(a);
    have_spare_normal_ = true;
    return r * std::cos(a);
  }

  double next_exponential() { return -std::log(next_uniform()); }

  /// Pareto with survival function tau/u on (tau, inf) (index-1 tail).
  double next_pareto(double tau) { return tau / next_uniform(); }

  /// Poisson count. Product method below 10, Hormann's PTRS transformed
  /// rejection above.
  std::uint64_t next_poisson(double mean);

 private:
  static std::uint64_t derive_key(std::uint64_t key, std::uint64_t id) {
    std::uint64_t h = detail::mix64(key ^ (detail::mix64(id + 0xC2B2AE3D27D4EB4FULL)));
    return detail::mix64(h + detail::kGolden);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
  double spare_normal_ = 0.0;
  bool have_spare_normal_ = false;
};

}  // namespace maternsim
