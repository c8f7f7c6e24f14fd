#pragma once

#include <cstdint>
#include <span>

namespace wrisk {

/// Deterministic generator (xoshiro256** seeded through splitmix64).
/// Simulated datasets must be bit-reproducible across platforms and thread
/// counts, which rules out the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal via the polar method.
  double normal();
  /// Uniform on [-sqrt(3), sqrt(3)]: mean zero, unit variance.
  double symmetric_uniform_unit();
  /// Index drawn according to `probabilities` (assumed to sum to one).
  int categorical(std::span<const double> probabilities);

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable substream seed for (stream, index) pairs, e.g. one substream per
/// observation so sampling is order- and thread-invariant.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace wrisk
