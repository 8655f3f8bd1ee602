#pragma once

#include <cstdint>
#include <span>

namespace eqm {

/// Standard normal variates addressed by (seed, stream, index).
///
/// Each pair of indices {2m, 2m+1} shares one Philox4x32-10 block with counter
/// m in the low words and the stream id in the high words; the block's two
/// 64-bit halves feed a Box-Muller transform whose cosine branch gives index 2m
/// and sine branch index 2m+1. Values therefore depend only on the address,
/// never on evaluation order or batching.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

  double at(std::uint64_t index) const noexcept;

  /// out[i] = at(first + i). Uses the active SIMD backend for the Philox blocks.
  void fill(std::uint64_t first, std::span<double> out) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Uniform in (0, 1] from the top 53 bits of a 64-bit word.
double uniform_open_closed(std::uint64_t bits) noexcept;
/// Uniform in [0, 1) from the top 53 bits of a 64-bit word.
double uniform_closed_open(std::uint64_t bits) noexcept;

}  // namespace eqm
