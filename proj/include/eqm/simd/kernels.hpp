#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// kernels_scalar.cpp and an AVX2 variant in kernels_avx2.cpp; both produce
// bit-identical results (no FMA, same operation order per lane).

#include <cstddef>
#include <cstdint>
#include <span>

namespace eqm::simd {

/// Philox4x32-10 over consecutive counters. Block i uses counter
/// {lo(first + i), hi(first + i), lo(stream), hi(stream)} and key {lo(seed), hi(seed)};
/// its four output words land in out[4i .. 4i+3]. out.size() must be a multiple of 4.
struct PhiloxBatch {
  std::uint64_t seed;
  std::uint64_t stream;
  std::uint64_t first;
};

/// Coefficients of one row of the backward heat operator
///   theta2 * d/dt + (theta4 / 2) d2/dq2 - drift(q) d/dq - potential(q)
/// sampled on a uniform q grid. drift and potential are indexed like the row.
struct StencilRow {
  std::span<const double> drift;
  std::span<const double> potential;
  double theta2;
  double theta4_half;
  double inv_2dt;
  double inv_dq2;
  double inv_2dq;
};

/// Coefficients of one explicit reverse-time step
///   out = cur + dt * (diffusion * D2 - advection(q) * D1 - reaction(q) * cur)
struct ReverseStepRow {
  std::span<const double> advection;
  std::span<const double> reaction;
  double diffusion_dt;
  double dt;
  double inv_dq2;
  double inv_2dq;
};

namespace scalar {
void philox4x32_10(const PhiloxBatch& batch, std::span<std::uint32_t> out);
double residual_row_max(const StencilRow& row, std::span<const double> prev,
                        std::span<const double> cur, std::span<const double> next);
void reverse_step_row(const ReverseStepRow& row, std::span<const double> cur, std::span<double> out);
}  // namespace scalar

namespace avx2 {
void philox4x32_10(const PhiloxBatch& batch, std::span<std::uint32_t> out);
double residual_row_max(const StencilRow& row, std::span<const double> prev,
                        std::span<const double> cur, std::span<const double> next);
void reverse_step_row(const ReverseStepRow& row, std::span<const double> cur, std::span<double> out);
}  // namespace avx2

// Dispatching entry points (use active_backend()).

void philox4x32_10(const PhiloxBatch& batch, std::span<std::uint32_t> out);

/// Max over interior points j in [1, n-2] of |residual|, n = cur.size().
double residual_row_max(const StencilRow& row, std::span<const double> prev,
                        std::span<const double> cur, std::span<const double> next);

/// Writes interior points j in [1, n-2] of out; out[0] and out[n-1] are untouched.
void reverse_step_row(const ReverseStepRow& row, std::span<const double> cur, std::span<double> out);

}  // namespace eqm::simd
