#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cpm {

/// SplitMix64: the output is a bijective hash of a counter advancing by a
/// fixed odd constant. Streams are derived from (seed, stream index) by
/// hashing the index into the initial counter, so trajectory k produces the
/// same numbers no matter which thread runs it or in which order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix(seed ^ mix(stream * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Exponential with the given rate, strictly positive.
  double next_exponential(double rate) {
    if (rate <= 0.0) throw std::domain_error("next_exponential: rate <= 0");
    return -std::log1p(-next_unit()) / rate;
  }

 private:
  std::uint64_t state_;
};

}  // namespace cpm
