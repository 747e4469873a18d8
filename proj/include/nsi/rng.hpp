#pragma once

#include <cstdint>

namespace nsi {

/// Counter-based pseudo-random stream. Output i is a SplitMix64-style
/// avalanche of key + i*phi, so the sequence is a pure function of (key,
/// counter). Substreams re-key with the same mixer and are independent of the
/// parent's position, which lets parallel replications reproduce serial runs
/// bit for bit.
///
/// Uniforms place the top 53 bits of a draw in the open interval (0,1);
/// normals come from the trigonometric Box-Muller transform (two uniforms per
/// pair, second value cached).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Derive an independent stream; depends only on (key, index).
  RngStream substream(std::uint64_t index) const;

  /// Stable 64-bit key of this stream, usable as a seed elsewhere.
  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  /// Uniform integer in [0, bound) via the multiply-shift reduction;
  /// consumes exactly one draw. bound must be >= 1.
  std::uint64_t next_below(std::uint64_t bound);
  /// Uniform real strictly inside (0, 1).
  double next_uniform();
  /// Standard normal deviate.
  double next_normal();

 private:
  RngStream() = default;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// One avalanche step over (seed, a, b); used to derive per-task seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace nsi
