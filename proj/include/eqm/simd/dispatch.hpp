#pragma once

#include <string_view>

namespace eqm::simd {

enum class Backend { Scalar, Avx2 };

/// True when the running CPU supports AVX2 and the AVX2 kernels were compiled in.
bool avx2_available() noexcept;

/// Backend used by the dispatching kernel entry points. Defaults to the best
/// available one, detected once at first use.
Backend active_backend() noexcept;

/// Forces a backend. Requesting Avx2 on a machine without it falls back to Scalar.
/// Returns the backend actually selected.
Backend set_backend(Backend requested) noexcept;

std::string_view backend_name(Backend b) noexcept;

/// RAII override of the active backend, restoring the previous one on exit.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) noexcept : previous_(active_backend()) { set_backend(b); }
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

}  // namespace eqm::simd
