#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kinlab {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw k of stream `key` is mix64(key + k * gamma).
/// Any draw can be produced without generating the ones before it, so a Monte
/// Carlo batch depends only on (run seed, batch index).
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  /// Key of batch `batch` within run `seed`.
  static constexpr std::uint64_t batch_key(std::uint64_t seed, std::uint64_t batch) {
    return mix64(seed ^ mix64(batch + 0xD1B54A32D192ED03ULL));
  }

  constexpr std::uint64_t at(std::uint64_t counter) const { return mix64(key_ + counter * kGamma); }

  std::uint64_t next_u64() { return at(counter_++); }

  /// Uniform in (0, 1): 53 random bits, never 0.
  double next_uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by Box-Muller; consumes two draws per call.
  double next_normal() {
    const double u1 = next_uniform(), u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace kinlab
