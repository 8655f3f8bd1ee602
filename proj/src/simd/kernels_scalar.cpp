#include "eqm/simd/kernels.hpp"

#include <cmath>

#include "philox_constants.hpp"

namespace eqm::simd::scalar {

using namespace eqm::simd::detail;

void philox4x32_10(const PhiloxBatch& batch, std::span<std::uint32_t> out) {
  const std::size_t blocks = out.size() / 4;
  for (std::size_t i = 0; i < blocks; ++i) {
    const std::uint64_t c = batch.first + i;
    std::uint32_t x0 = static_cast<std::uint32_t>(c);
    std::uint32_t x1 = static_cast<std::uint32_t>(c >> 32);
    std::uint32_t x2 = static_cast<std::uint32_t>(batch.stream);
    std::uint32_t x3 = static_cast<std::uint32_t>(batch.stream >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(batch.seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(batch.seed >> 32);
    for (int r = 0; r < kPhiloxRounds; ++r) {
      if (r > 0) {
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
      }
      const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * x0;
      const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * x2;
      const std::uint32_t y0 = static_cast<std::uint32_t>(p1 >> 32) ^ x1 ^ k0;
      const std::uint32_t y1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t y2 = static_cast<std::uint32_t>(p0 >> 32) ^ x3 ^ k1;
      const std::uint32_t y3 = static_cast<std::uint32_t>(p0);
      x0 = y0;
      x1 = y1;
      x2 = y2;
      x3 = y3;
    }
    out[4 * i + 0] = x0;
    out[4 * i + 1] = x1;
    out[4 * i + 2] = x2;
    out[4 * i + 3] = x3;
  }
}

double residual_row_max(const StencilRow& row, std::span<const double> prev,
                        std::span<const double> cur, std::span<const double> next) {
  const std::size_t n = cur.size();
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double dt_term = row.theta2 * ((next[j] - prev[j]) * row.inv_2dt);
    const double dqq = (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) * row.inv_dq2;
    const double dq = (cur[j + 1] - cur[j - 1]) * row.inv_2dq;
    const double r = dt_term + row.theta4_half * dqq - row.drift[j] * dq - row.potential[j] * cur[j];
    const double a = std::fabs(r);
    if (a > worst) worst = a;
  }
  return worst;
}

void reverse_step_row(const ReverseStepRow& row, std::span<const double> cur, std::span<double> out) {
  const std::size_t n = cur.size();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double d2 = (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) * row.inv_dq2;
    const double d1 = (cur[j + 1] - cur[j - 1]) * row.inv_2dq;
    const double rhs = row.diffusion_dt * d2 - row.dt * (row.advection[j] * d1) - row.dt * (row.reaction[j] * cur[j]);
    out[j] = cur[j] + rhs;
  }
}

}  // namespace eqm::simd::scalar
