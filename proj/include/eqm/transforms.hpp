#pragma once

// Closed-form maps from solutions of the free backward heat equation to
// solutions under a linear potential, a harmonic potential, and a linear
// (gradient) drift. Transforms are lazy: they keep the base solution and
// evaluate through it, so drifts come from exact log-derivative composition.

#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "eqm/solutions.hpp"

namespace eqm {

/// Parameters below this magnitude use the analytic zero-parameter limit.
inline constexpr double kRemovableSingularityThreshold = 1e-8;

/// Constant force lambda of the linear potential V(q) = lambda q.
struct LinearForce {
  double lambda_force;
};

/// Frequency omega >= 0 of the potential V(q) = omega^2 q^2 / 2.
struct OscillatorFreq {
  double omega;
};

/// Rate beta of the gradient drift a = theta^2 beta (vector potential beta q).
struct DriftRate {
  double beta_rate;
};

class TransformedSolution {
 public:
  using Tag = std::variant<LinearForce, OscillatorFreq, DriftRate>;

  TransformedSolution(PositiveSolution base, Tag tag);

  const PositiveSolution& base() const noexcept { return base_; }
  const Tag& tag() const noexcept { return tag_; }
  const Theta& theta() const noexcept { return base_.theta(); }

  /// Equation the transformed solution satisfies:
  /// linear -> V = lambda q; quadratic -> V = omega^2 q^2 / 2;
  /// gradient drift -> V = 0 with first-order coefficient theta^2 beta q.
  TargetEquation target() const;

  /// Point (s, x) at which the base is evaluated for (t, q).
  std::pair<double, double> base_argument(double t, double q) const;
  bool in_domain(double t, double q) const noexcept;

  double log_value(double t, double q) const;
  /// d/dq ln eta^V by the chain rule through the closed form.
  double log_derivative(double t, double q) const;

 private:
  PositiveSolution base_;
  Tag tag_;
};

double eval(const TransformedSolution& sol, double t, double q);

/// theta^2 d/dq ln eta^V (no vector-potential correction).
double drift_of(const TransformedSolution& sol, double t, double q);

TransformedSolution linear_transform(const PositiveSolution& base, LinearForce f, Theta theta);
TransformedSolution quadratic_transform(const PositiveSolution& base, OscillatorFreq f, Theta theta);
TransformedSolution ou_transform(const PositiveSolution& base, DriftRate f, Theta theta);

/// lambda t + B(t, q - lambda t^2 / 2)
double linear_drift(const PositiveSolution& base, LinearForce f, Theta theta, double t, double q);
/// omega q tanh(omega t) + B(tanh(omega t) / omega, q / cosh(omega t)) / cosh(omega t)
double quadratic_drift(const PositiveSolution& base, OscillatorFreq f, Theta theta, double t, double q);
/// e^{beta t} B((e^{2 beta t} - 1) / (2 beta), e^{beta t} q) - beta q
double ou_drift(const PositiveSolution& base, DriftRate f, Theta theta, double t, double q);

/// Process drift of a transformed solution: drift_of minus beta q in the
/// gradient-drift case, dispatching to the dedicated formulas above.
double process_drift(const TransformedSolution& sol, double t, double q);

struct TimedSample {
  double t;
  double z;
};

/// z_V(t) = z(t) + lambda t^2 / 2 for every sample.
std::vector<TimedSample> pathwise_map_linear(std::span<const TimedSample> path, LinearForce f);

}  // namespace eqm
