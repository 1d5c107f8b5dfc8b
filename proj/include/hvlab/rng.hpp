#pragma once

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so any partition of the counter range across
// threads reproduces the same sequence.

#include <cstdint>

namespace hvlab {

struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

namespace detail {

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  constexpr explicit CounterRng(SeedSpec spec)
      : key_(detail::mix64(spec.seed ^ detail::mix64(spec.stream + 0x632BE59BD9B4E019ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    // Two rounds keep neighbouring counters and keys decorrelated.
    return detail::mix64(detail::mix64(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL) ^ key_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

}  // namespace hvlab
