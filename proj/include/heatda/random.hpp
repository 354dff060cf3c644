#pragma once

#include <cstdint>

namespace heatda {

/// Counter-based generator: the value for (seed, stream, counter) is a pure
/// function, so parallel workers draw reproducible numbers without sharing
/// state. `split` derives an independent stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  CounterRng split(std::uint64_t substream) const { return CounterRng(key_, substream + 1); }

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + mix(counter ^ 0x9e3779b97f4a7c15ULL)); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const { return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53; }

  double uniform(std::uint64_t counter, double lo, double hi) const { return lo + (hi - lo) * uniform(counter); }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace heatda
