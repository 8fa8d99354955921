#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace cenlad {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for replicate `replicate` of design `design` derived from a base seed.
constexpr std::uint64_t hash64(std::uint64_t base_seed, std::uint64_t design,
                               std::uint64_t replicate) noexcept {
  constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t h = mix64(base_seed + kGolden);
  h = mix64(h ^ (design + 1) * kGolden);
  h = mix64(h ^ (replicate + 1) * 0xD1B54A32D192ED03ULL);
  return h;
}

/// Counter-based generator: the k-th draw is mix64(seed + k * golden).
///
/// Every draw is a pure function of (seed, k), so streams are reproducible
/// bit-for-bit on any platform. Normal variates use Box-Muller with both
/// outputs consumed, so the draw count per variate is fixed.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(seed_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  /// +1 or -1 with probability 1/2 each.
  double sign() noexcept { return ((*this)() >> 63) != 0 ? 1.0 : -1.0; }

  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cenlad
