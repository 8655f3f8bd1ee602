#include "eqm/simd/dispatch.hpp"

#include <atomic>

#include "eqm/simd/kernels.hpp"

namespace eqm::simd {

namespace {

Backend detect() noexcept { return avx2_available() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool avx2_available() noexcept {
#if defined(EQM_HAVE_AVX2_KERNELS) && (defined(__x86_64__) || defined(__i386__))
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
#else
  return false;
#endif
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

Backend set_backend(Backend requested) noexcept {
  const Backend chosen = (requested == Backend::Avx2 && !avx2_available()) ? Backend::Scalar : requested;
  current().store(chosen, std::memory_order_relaxed);
  return chosen;
}

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

#if defined(EQM_HAVE_AVX2_KERNELS)
#define EQM_DISPATCH(fn, ...) \
  (active_backend() == Backend::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define EQM_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void philox4x32_10(const PhiloxBatch& batch, std::span<std::uint32_t> out) {
  EQM_DISPATCH(philox4x32_10, batch, out);
}

double residual_row_max(const StencilRow& row, std::span<const double> prev,
                        std::span<const double> cur, std::span<const double> next) {
  return EQM_DISPATCH(residual_row_max, row, prev, cur, next);
}

void reverse_step_row(const ReverseStepRow& row, std::span<const double> cur, std::span<double> out) {
  EQM_DISPATCH(reverse_step_row, row, cur, out);
}

#undef EQM_DISPATCH

}  // namespace eqm::simd
