#pragma once

// One-factor affine short-rate models dr = sqrt(alpha r + beta) dw + (phi - lambda r) dt
// viewed as Bernstein processes through z = sqrt(alpha r + beta).
//
// Ito on z gives dz = (alpha/2) dw + (c1 / z + c2 z) dt with
//   c1 = alpha (phi~ - alpha/4) / 2,  c2 = -lambda / 2,  phi~ = phi + lambda beta / alpha,
// so theta = alpha / 2, and the stationary HJB relation
//   V = b^2 / 2 + (theta^2 / 2) b'
// yields V(q) = A / q^2 + B q^2 with
//   A = (alpha^2 / 8)(phi~ - alpha/4)(phi~ - 3 alpha/4),  B = lambda^2 / 8.

#include <cstddef>
#include <cstdint>

#include "eqm/bernstein.hpp"
#include "eqm/solutions.hpp"

namespace eqm {

struct AffineRateModel {
  double alpha;
  double beta;
  double phi;
  double lambda_mr;

  void validate() const;
  double phi_tilde() const noexcept { return phi + lambda_mr * beta / alpha; }
};

struct BernsteinImage {
  Theta theta;
  double phi_tilde;
  double inv_sq_A;
  double quad_B;
  double drift_c1;
  double drift_c2;

  PotentialSpec potential() const noexcept { return {inv_sq_A, quad_B, 0.0, 0.0}; }
  /// c1 / q + c2 q, guarded around the singularity at 0.
  DriftField drift_field() const;
};

/// Drift b(q) = c1 / q + c2 q.
struct InverseLinearDrift {
  double c1;
  double c2;

  double operator()(double q) const noexcept { return c1 / q + c2 * q; }
};

enum class IsovectorDim { Four = 4, Six = 6 };

inline constexpr double kClassifyTolerance = 1e-12;

BernsteinImage to_bernstein(const AffineRateModel& m);

/// Six iff |A| <= tol * alpha^2, or phi~ lands exactly on alpha/4 or 3 alpha/4.
IsovectorDim classify(const AffineRateModel& m, double tol = kClassifyTolerance);

/// Full-truncation Euler: vol sqrt(max(alpha r + beta, 0)), drift phi - lambda r.
PathEnsemble simulate_rate(const AffineRateModel& m, double r0, const TimeGrid& grid, std::size_t n_paths,
                           std::uint64_t seed, const SimulationOptions& options = {});

/// Exact first moment phi/lambda + (r0 - phi/lambda) e^{-lambda t} (r0 + phi t when lambda = 0).
double rate_mean(const AffineRateModel& m, double r0, double t);

/// Pointwise z = sqrt(alpha r + beta); paths are absorbed where alpha r + beta <= kGuardFloor^2.
PathEnsemble z_of_rate(const AffineRateModel& m, const PathEnsemble& rates);

/// Potential of a time-independent drift c1/q + c2 q via the stationary HJB
/// relation; the additive energy constant is reported as 0.
PotentialSpec hjb_potential(const InverseLinearDrift& b, Theta theta);

}  // namespace eqm
