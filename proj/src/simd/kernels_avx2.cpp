#include "eqm/simd/kernels.hpp"

#include <immintrin.h>

#include "philox_constants.hpp"

namespace eqm::simd::avx2 {

using namespace eqm::simd::detail;

// Four Philox blocks per iteration, one per 64-bit lane; each lane holds a
// 32-bit word in its low half so _mm256_mul_epu32 yields the full product.
void philox4x32_10(const PhiloxBatch& batch, std::span<std::uint32_t> out) {
  const std::size_t blocks = out.size() / 4;
  const __m256i lo_mask = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i m0 = _mm256_set1_epi64x(kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(kPhiloxM1);
  const __m256i s_lo = _mm256_set1_epi64x(static_cast<std::uint32_t>(batch.stream));
  const __m256i s_hi = _mm256_set1_epi64x(static_cast<std::uint32_t>(batch.stream >> 32));
  const auto key0 = static_cast<std::uint32_t>(batch.seed);
  const auto key1 = static_cast<std::uint32_t>(batch.seed >> 32);

  std::size_t i = 0;
  for (; i + 4 <= blocks; i += 4) {
    const std::uint64_t base = batch.first + i;
    const __m256i ctr = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(base)),
                                         _mm256_set_epi64x(3, 2, 1, 0));
    __m256i x0 = _mm256_and_si256(ctr, lo_mask);
    __m256i x1 = _mm256_srli_epi64(ctr, 32);
    __m256i x2 = s_lo;
    __m256i x3 = s_hi;
    std::uint32_t k0 = key0;
    std::uint32_t k1 = key1;
    for (int r = 0; r < kPhiloxRounds; ++r) {
      if (r > 0) {
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
      }
      const __m256i p0 = _mm256_mul_epu32(x0, m0);
      const __m256i p1 = _mm256_mul_epu32(x2, m1);
      const __m256i kv0 = _mm256_set1_epi64x(k0);
      const __m256i kv1 = _mm256_set1_epi64x(k1);
      const __m256i y0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), x1), kv0);
      const __m256i y1 = _mm256_and_si256(p1, lo_mask);
      const __m256i y2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), x3), kv1);
      const __m256i y3 = _mm256_and_si256(p0, lo_mask);
      x0 = y0;
      x1 = y1;
      x2 = y2;
      x3 = y3;
    }
    alignas(32) std::uint64_t w[4][4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[0]), x0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[1]), x1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[2]), x2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[3]), x3);
    for (std::size_t lane = 0; lane < 4; ++lane) {
      std::uint32_t* dst = out.data() + 4 * (i + lane);
      dst[0] = static_cast<std::uint32_t>(w[0][lane]);
      dst[1] = static_cast<std::uint32_t>(w[1][lane]);
      dst[2] = static_cast<std::uint32_t>(w[2][lane]);
      dst[3] = static_cast<std::uint32_t>(w[3][lane]);
    }
  }
  if (i < blocks) {
    scalar::philox4x32_10({batch.seed, batch.stream, batch.first + i}, out.subspan(4 * i, 4 * (blocks - i)));
  }
}

double residual_row_max(const StencilRow& row, std::span<const double> prev,
                        std::span<const double> cur, std::span<const double> next) {
  const std::size_t n = cur.size();
  if (n < 3) return 0.0;
  const __m256d theta2 = _mm256_set1_pd(row.theta2);
  const __m256d theta4_half = _mm256_set1_pd(row.theta4_half);
  const __m256d inv_2dt = _mm256_set1_pd(row.inv_2dt);
  const __m256d inv_dq2 = _mm256_set1_pd(row.inv_dq2);
  const __m256d inv_2dq = _mm256_set1_pd(row.inv_2dq);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d worst_v = _mm256_setzero_pd();

  std::size_t j = 1;
  for (; j + 4 < n; j += 4) {
    const __m256d left = _mm256_loadu_pd(cur.data() + j - 1);
    const __m256d mid = _mm256_loadu_pd(cur.data() + j);
    const __m256d right = _mm256_loadu_pd(cur.data() + j + 1);
    const __m256d before = _mm256_loadu_pd(prev.data() + j);
    const __m256d after = _mm256_loadu_pd(next.data() + j);
    const __m256d drift = _mm256_loadu_pd(row.drift.data() + j);
    const __m256d pot = _mm256_loadu_pd(row.potential.data() + j);

    const __m256d dt_term = _mm256_mul_pd(theta2, _mm256_mul_pd(_mm256_sub_pd(after, before), inv_2dt));
    const __m256d dqq = _mm256_mul_pd(
        _mm256_add_pd(_mm256_sub_pd(right, _mm256_mul_pd(two, mid)), left), inv_dq2);
    const __m256d dq = _mm256_mul_pd(_mm256_sub_pd(right, left), inv_2dq);
    __m256d r = _mm256_add_pd(dt_term, _mm256_mul_pd(theta4_half, dqq));
    r = _mm256_sub_pd(r, _mm256_mul_pd(drift, dq));
    r = _mm256_sub_pd(r, _mm256_mul_pd(pot, mid));
    worst_v = _mm256_max_pd(worst_v, _mm256_andnot_pd(sign_mask, r));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, worst_v);
  double worst = 0.0;
  for (double v : lanes) {
    if (v > worst) worst = v;
  }
  if (j + 1 < n) {
    // Tail: scalar reference on the remaining interior points, with one halo point each side.
    const std::size_t off = j - 1;
    const std::size_t len = n - off;
    const StencilRow tail{row.drift.subspan(off, len), row.potential.subspan(off, len), row.theta2,
                          row.theta4_half, row.inv_2dt, row.inv_dq2, row.inv_2dq};
    const double t = scalar::residual_row_max(tail, prev.subspan(off, len), cur.subspan(off, len),
                                              next.subspan(off, len));
    if (t > worst) worst = t;
  }
  return worst;
}

void reverse_step_row(const ReverseStepRow& row, std::span<const double> cur, std::span<double> out) {
  const std::size_t n = cur.size();
  if (n < 3) return;
  const __m256d diffusion_dt = _mm256_set1_pd(row.diffusion_dt);
  const __m256d dt = _mm256_set1_pd(row.dt);
  const __m256d inv_dq2 = _mm256_set1_pd(row.inv_dq2);
  const __m256d inv_2dq = _mm256_set1_pd(row.inv_2dq);
  const __m256d two = _mm256_set1_pd(2.0);

  std::size_t j = 1;
  for (; j + 4 < n; j += 4) {
    const __m256d left = _mm256_loadu_pd(cur.data() + j - 1);
    const __m256d mid = _mm256_loadu_pd(cur.data() + j);
    const __m256d right = _mm256_loadu_pd(cur.data() + j + 1);
    const __m256d adv = _mm256_loadu_pd(row.advection.data() + j);
    const __m256d react = _mm256_loadu_pd(row.reaction.data() + j);

    const __m256d d2 = _mm256_mul_pd(
        _mm256_add_pd(_mm256_sub_pd(right, _mm256_mul_pd(two, mid)), left), inv_dq2);
    const __m256d d1 = _mm256_mul_pd(_mm256_sub_pd(right, left), inv_2dq);
    __m256d rhs = _mm256_mul_pd(diffusion_dt, d2);
    rhs = _mm256_sub_pd(rhs, _mm256_mul_pd(dt, _mm256_mul_pd(adv, d1)));
    rhs = _mm256_sub_pd(rhs, _mm256_mul_pd(dt, _mm256_mul_pd(react, mid)));
    _mm256_storeu_pd(out.data() + j, _mm256_add_pd(mid, rhs));
  }
  if (j + 1 < n) {
    const std::size_t off = j - 1;
    const std::size_t len = n - off;
    const ReverseStepRow tail{row.advection.subspan(off, len), row.reaction.subspan(off, len),
                              row.diffusion_dt, row.dt, row.inv_dq2, row.inv_2dq};
    scalar::reverse_step_row(tail, cur.subspan(off, len), out.subspan(off, len));
  }
}

}  // namespace eqm::simd::avx2
