#pragma once

#include <cstdint>

namespace chronoslit {

/// Counter-based generator: the i-th output of stream (seed, stream) is the
/// SplitMix64 finalizer applied to key + (i + 1) * 0x9e3779b97f4a7c15, where
/// key = mix(seed ^ mix(stream + 0x9e3779b97f4a7c15)). Bit-identical on every
/// platform, and any output can be reached without generating the ones before.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform();

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace chronoslit
