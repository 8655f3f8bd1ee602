#include "eqm/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "eqm/simd/kernels.hpp"

namespace eqm {

namespace {

constexpr double kTwoPow53Inv = 0x1.0p-53;

struct NormalPair {
  double first;
  double second;
};

NormalPair box_muller(const std::uint32_t* w) noexcept {
  const std::uint64_t a = (std::uint64_t{w[1]} << 32) | w[0];
  const std::uint64_t b = (std::uint64_t{w[3]} << 32) | w[2];
  const double radius = std::sqrt(-2.0 * std::log(uniform_open_closed(a)));
  const double angle = 2.0 * std::numbers::pi * uniform_closed_open(b);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace

double uniform_open_closed(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * kTwoPow53Inv;
}

double uniform_closed_open(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * kTwoPow53Inv;
}

double NormalStream::at(std::uint64_t index) const noexcept {
  std::array<std::uint32_t, 4> w{};
  simd::scalar::philox4x32_10({seed_, stream_, index / 2}, w);
  const NormalPair p = box_muller(w.data());
  return (index % 2 == 0) ? p.first : p.second;
}

void NormalStream::fill(std::uint64_t first, std::span<double> out) const {
  if (out.empty()) return;
  const std::uint64_t last = first + out.size() - 1;
  const std::uint64_t block_begin = first / 2;
  const std::uint64_t block_end = last / 2 + 1;
  const std::size_t n_blocks = static_cast<std::size_t>(block_end - block_begin);

  // Chunked so the scratch buffer stays cache-resident for long paths.
  constexpr std::size_t kChunk = 512;
  std::array<std::uint32_t, 4 * kChunk> words{};
  std::uint64_t idx = first;
  std::size_t written = 0;
  for (std::size_t done = 0; done < n_blocks; done += kChunk) {
    const std::size_t count = std::min(kChunk, n_blocks - done);
    const std::uint64_t chunk_first = block_begin + done;
    simd::philox4x32_10({seed_, stream_, chunk_first}, std::span(words.data(), 4 * count));
    for (std::size_t b = 0; b < count; ++b) {
      const NormalPair p = box_muller(words.data() + 4 * b);
      const std::uint64_t even = 2 * (chunk_first + b);
      if (idx == even && written < out.size()) {
        out[written++] = p.first;
        ++idx;
      }
      if (idx == even + 1 && written < out.size()) {
        out[written++] = p.second;
        ++idx;
      }
    }
  }
}

}  // namespace eqm
