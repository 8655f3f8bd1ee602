#pragma once

// Strictly positive closed-form solutions of the free backward heat equation
//   d(eta)/dt = -(theta^2 / 2) d2(eta)/dq2
// together with a finite-difference residual checker for the general
// backward heat equation with drift
//   theta^2 eta_t + (theta^4 / 2) eta_qq - (a q + b) eta_q - V(q) eta = 0
// and an explicit reverse-time propagator for the same equation.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace eqm {

/// Diffusion scale theta > 0 (theta^2 plays the role of hbar).
class Theta {
 public:
  explicit Theta(double value);
  double value() const noexcept { return value_; }
  double squared() const noexcept { return value_ * value_; }

 private:
  double value_;
};

/// V(q) = inv_sq / q^2 + quad q^2 + lin q + constant. constant is only known
/// modulo an additive energy.
struct PotentialSpec {
  double inv_sq = 0.0;
  double quad = 0.0;
  double lin = 0.0;
  double constant = 0.0;

  double operator()(double q) const;
  bool singular_at_origin() const noexcept { return inv_sq != 0.0; }
};

/// First-order coefficient (a q + b) of the backward heat equation with drift.
struct VectorDrift {
  double a = 0.0;
  double b = 0.0;

  double operator()(double q) const noexcept { return a * q + b; }
};

/// The PDE a solution is certified against.
struct TargetEquation {
  PotentialSpec potential;
  VectorDrift drift;
};

/// Uniform (t, q) grid with nt time steps and nq space steps, i.e.
/// (nt + 1) x (nq + 1) nodes.
struct GridSpec {
  double t0;
  double t1;
  std::size_t nt;
  double q0;
  double q1;
  std::size_t nq;

  void validate() const;
  double dt() const noexcept { return (t1 - t0) / static_cast<double>(nt); }
  double dq() const noexcept { return (q1 - q0) / static_cast<double>(nq); }
  double t(std::size_t i) const noexcept;
  double q(std::size_t j) const noexcept;
  GridSpec refined() const noexcept { return {t0, t1, 2 * nt, q0, q1, 2 * nq}; }
};

/// Samples on a GridSpec, row-major with one row per time node.
struct GridField {
  GridSpec grid;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t j) { return values[i * (grid.nq + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * (grid.nq + 1) + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span(values).subspan(i * (grid.nq + 1), grid.nq + 1);
  }
  std::span<double> row(std::size_t i) { return std::span(values).subspan(i * (grid.nq + 1), grid.nq + 1); }
};

GridField sample_field(const GridSpec& grid, const std::function<double(double, double)>& f);

class PositiveSolution;

namespace solution {

struct Constant {};

/// exp(a q - theta^2 a^2 t / 2)
struct Exponential {
  double a;
};

/// (T - t)^(-1/2) exp(-(q - center)^2 / (2 theta^2 (T - t))), valid for
/// t <= T - 1e-6 (T - t_start).
struct ReversedKernel {
  double horizon;
  double center = 0.0;
  double t_start = 0.0;

  double latest_time() const noexcept { return horizon - 1e-6 * (horizon - t_start); }
};

struct Mixture {
  std::vector<double> weights;
  std::vector<PositiveSolution> components;
};

}  // namespace solution

/// A strictly positive closed-form solution of the free backward heat equation.
/// Immutable; copies share the mixture payload.
class PositiveSolution {
 public:
  using Variant = std::variant<solution::Constant, solution::Exponential, solution::ReversedKernel,
                               std::shared_ptr<const solution::Mixture>>;

  static PositiveSolution constant(Theta theta);
  static PositiveSolution exponential(Theta theta, double a);
  static PositiveSolution reversed_kernel(Theta theta, double horizon, double center = 0.0, double t_start = 0.0);
  /// Weights must be strictly positive; every component must share theta.
  static PositiveSolution mixture(std::vector<double> weights, std::vector<PositiveSolution> components);

  const Theta& theta() const noexcept { return theta_; }
  const Variant& variant() const noexcept { return variant_; }

  /// Latest admissible time (+inf when unbounded).
  double latest_time() const noexcept;
  bool in_domain(double t, double q) const noexcept;

  /// ln eta(t, q). Throws DomainError outside the domain.
  double log_value(double t, double q) const;
  /// d/dq ln eta(t, q) from the closed form.
  double log_derivative(double t, double q) const;

 private:
  PositiveSolution(Theta theta, Variant v) : theta_(theta), variant_(std::move(v)) {}

  Theta theta_;
  Variant variant_;
};

double eval(const PositiveSolution& sol, double t, double q);

/// theta^2 d/dq ln eta, the forward drift of the associated Bernstein process.
double drift_of(const PositiveSolution& sol, double t, double q);

/// Max absolute residual of
///   theta^2 eta_t + (theta^4/2) eta_qq - (a q + b) eta_q - V(q) eta
/// over interior nodes, with centered second-order differences in t and q.
double pde_residual(const GridField& field, const TargetEquation& eq, Theta theta);

/// Integrates the backward heat equation with drift from t1 down to t0 with an
/// explicit scheme. Requires theta^2 dt / dq^2 <= 1/2. Boundary columns follow
/// `boundary` when supplied, else log-linear extrapolation from the interior.
GridField propagate_reverse(std::span<const double> final_values, const TargetEquation& eq, Theta theta,
                            const GridSpec& grid,
                            const std::function<double(double, double)>& boundary = nullptr);

}  // namespace eqm
