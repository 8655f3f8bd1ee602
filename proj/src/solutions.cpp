#include "eqm/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eqm/error.hpp"
#include "eqm/simd/kernels.hpp"

namespace eqm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}

}  // namespace

Theta::Theta(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument("theta must be a finite positive number, got " + std::to_string(value));
  }
}

double PotentialSpec::operator()(double q) const {
  double v = quad * q * q + lin * q + constant;
  if (inv_sq != 0.0) {
    if (q == 0.0) throw DomainError("potential with an inverse-square term is singular at q = 0");
    v += inv_sq / (q * q);
  }
  return v;
}

void GridSpec::validate() const {
  require_finite(t0, "grid t0");
  require_finite(t1, "grid t1");
  require_finite(q0, "grid q0");
  require_finite(q1, "grid q1");
  if (!(t0 < t1)) throw InvalidArgument("grid requires t0 < t1");
  if (!(q0 < q1)) throw InvalidArgument("grid requires q0 < q1");
  if (nt < 2) throw InvalidArgument("grid requires nt >= 2");
  if (nq < 3) throw InvalidArgument("grid requires nq >= 3");
}

double GridSpec::t(std::size_t i) const noexcept {
  return t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(nt);
}

double GridSpec::q(std::size_t j) const noexcept {
  return q0 + (q1 - q0) * static_cast<double>(j) / static_cast<double>(nq);
}

GridField sample_field(const GridSpec& grid, const std::function<double(double, double)>& f) {
  grid.validate();
  GridField field{grid, std::vector<double>((grid.nt + 1) * (grid.nq + 1))};
  for (std::size_t i = 0; i <= grid.nt; ++i) {
    const double t = grid.t(i);
    for (std::size_t j = 0; j <= grid.nq; ++j) field.at(i, j) = f(t, grid.q(j));
  }
  return field;
}

PositiveSolution PositiveSolution::constant(Theta theta) { return {theta, solution::Constant{}}; }

PositiveSolution PositiveSolution::exponential(Theta theta, double a) {
  require_finite(a, "exponential rate a");
  return {theta, solution::Exponential{a}};
}

PositiveSolution PositiveSolution::reversed_kernel(Theta theta, double horizon, double center, double t_start) {
  require_finite(horizon, "kernel horizon");
  require_finite(center, "kernel center");
  require_finite(t_start, "kernel start time");
  if (!(t_start < horizon)) throw InvalidArgument("kernel start time must precede its horizon");
  return {theta, solution::ReversedKernel{horizon, center, t_start}};
}

PositiveSolution PositiveSolution::mixture(std::vector<double> weights, std::vector<PositiveSolution> components) {
  if (components.empty()) throw InvalidArgument("mixture needs at least one component");
  if (weights.size() != components.size()) throw InvalidArgument("mixture weights and components differ in length");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("mixture weights must be finite and strictly positive");
  }
  const Theta theta = components.front().theta();
  for (const auto& c : components) {
    if (c.theta().value() != theta.value()) throw InvalidArgument("mixture components must share theta");
  }
  auto payload = std::make_shared<const solution::Mixture>(solution::Mixture{std::move(weights), std::move(components)});
  return {theta, std::move(payload)};
}

double PositiveSolution::latest_time() const noexcept {
  return std::visit(Overloaded{
                        [](const solution::Constant&) { return std::numeric_limits<double>::infinity(); },
                        [](const solution::Exponential&) { return std::numeric_limits<double>::infinity(); },
                        [](const solution::ReversedKernel& k) { return k.latest_time(); },
                        [](const std::shared_ptr<const solution::Mixture>& m) {
                          double latest = std::numeric_limits<double>::infinity();
                          for (const auto& c : m->components) latest = std::min(latest, c.latest_time());
                          return latest;
                        },
                    },
                    variant_);
}

bool PositiveSolution::in_domain(double t, double q) const noexcept {
  return std::isfinite(t) && std::isfinite(q) && t <= latest_time();
}

double PositiveSolution::log_value(double t, double q) const {
  if (!in_domain(t, q)) {
    throw DomainError("solution evaluated outside its domain at t = " + std::to_string(t) +
                      ", q = " + std::to_string(q));
  }
  const double theta2 = theta_.squared();
  return std::visit(Overloaded{
                        [](const solution::Constant&) { return 0.0; },
                        [&](const solution::Exponential& e) { return e.a * q - 0.5 * theta2 * e.a * e.a * t; },
                        [&](const solution::ReversedKernel& k) {
                          const double tau = k.horizon - t;
                          const double x = q - k.center;
                          return -0.5 * std::log(tau) - x * x / (2.0 * theta2 * tau);
                        },
                        [&](const std::shared_ptr<const solution::Mixture>& m) {
                          // log-sum-exp over ln w_i + ln eta_i
                          std::vector<double> terms(m->components.size());
                          double top = -std::numeric_limits<double>::infinity();
                          for (std::size_t i = 0; i < terms.size(); ++i) {
                            terms[i] = std::log(m->weights[i]) + m->components[i].log_value(t, q);
                            top = std::max(top, terms[i]);
                          }
                          double sum = 0.0;
                          for (double v : terms) sum += std::exp(v - top);
                          return top + std::log(sum);
                        },
                    },
                    variant_);
}

double PositiveSolution::log_derivative(double t, double q) const {
  if (!in_domain(t, q)) {
    throw DomainError("solution differentiated outside its domain at t = " + std::to_string(t) +
                      ", q = " + std::to_string(q));
  }
  const double theta2 = theta_.squared();
  return std::visit(Overloaded{
                        [](const solution::Constant&) { return 0.0; },
                        [](const solution::Exponential& e) { return e.a; },
                        [&](const solution::ReversedKernel& k) { return -(q - k.center) / (theta2 * (k.horizon - t)); },
                        [&](const std::shared_ptr<const solution::Mixture>& m) {
                          // Weighted average of component log-derivatives, weights w_i eta_i / eta.
                          std::vector<double> terms(m->components.size());
                          double top = -std::numeric_limits<double>::infinity();
                          for (std::size_t i = 0; i < terms.size(); ++i) {
                            terms[i] = std::log(m->weights[i]) + m->components[i].log_value(t, q);
                            top = std::max(top, terms[i]);
                          }
                          double num = 0.0;
                          double den = 0.0;
                          for (std::size_t i = 0; i < terms.size(); ++i) {
                            const double w = std::exp(terms[i] - top);
                            num += w * m->components[i].log_derivative(t, q);
                            den += w;
                          }
                          return num / den;
                        },
                    },
                    variant_);
}

double eval(const PositiveSolution& sol, double t, double q) { return std::exp(sol.log_value(t, q)); }

double drift_of(const PositiveSolution& sol, double t, double q) {
  return sol.theta().squared() * sol.log_derivative(t, q);
}

namespace {

void validate_field(const GridField& field) {
  field.grid.validate();
  const std::size_t expected = (field.grid.nt + 1) * (field.grid.nq + 1);
  if (field.values.size() != expected) {
    throw InvalidArgument("grid field has " + std::to_string(field.values.size()) + " values, expected " +
                          std::to_string(expected));
  }
  for (double v : field.values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("grid field values must be finite and strictly positive");
  }
}

// Per-node drift and potential on the q grid; the potential must be finite at every node used.
void tabulate(const GridSpec& grid, const TargetEquation& eq, double scale, std::vector<double>& drift,
              std::vector<double>& potential) {
  drift.resize(grid.nq + 1);
  potential.resize(grid.nq + 1);
  for (std::size_t j = 0; j <= grid.nq; ++j) {
    const double q = grid.q(j);
    drift[j] = eq.drift(q) * scale;
    if (eq.potential.singular_at_origin() && q == 0.0) {
      // Only reachable on a boundary node is acceptable; interior hits are rejected by callers.
      potential[j] = 0.0;
      if (j != 0 && j != grid.nq) throw InvalidArgument("grid contains q = 0 where the potential is singular");
      continue;
    }
    potential[j] = eq.potential(q) * scale;
  }
}

}  // namespace

double pde_residual(const GridField& field, const TargetEquation& eq, Theta theta) {
  validate_field(field);
  const GridSpec& g = field.grid;
  std::vector<double> drift;
  std::vector<double> potential;
  tabulate(g, eq, 1.0, drift, potential);

  const double theta2 = theta.squared();
  const simd::StencilRow row{drift, potential, theta2, 0.5 * theta2 * theta2, 0.5 / g.dt(),
                             1.0 / (g.dq() * g.dq()), 0.5 / g.dq()};
  double worst = 0.0;
  for (std::size_t i = 1; i < g.nt; ++i) {
    worst = std::max(worst, simd::residual_row_max(row, field.row(i - 1), field.row(i), field.row(i + 1)));
  }
  return worst;
}

GridField propagate_reverse(std::span<const double> final_values, const TargetEquation& eq, Theta theta,
                            const GridSpec& grid, const std::function<double(double, double)>& boundary) {
  grid.validate();
  if (final_values.size() != grid.nq + 1) {
    throw InvalidArgument("final data has " + std::to_string(final_values.size()) + " values, expected " +
                          std::to_string(grid.nq + 1));
  }
  for (double v : final_values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("final data must be finite and strictly positive");
  }
  const double theta2 = theta.squared();
  const double dt = grid.dt();
  const double dq = grid.dq();
  const double ratio = theta2 * dt / (dq * dq);
  if (ratio > 0.5 * (1.0 + 1e-12)) {
    throw InvalidArgument("explicit scheme unstable: theta^2 dt / dq^2 = " + std::to_string(ratio) + " > 1/2");
  }

  std::vector<double> advection;
  std::vector<double> reaction;
  tabulate(grid, eq, 1.0 / theta2, advection, reaction);

  GridField field{grid, std::vector<double>((grid.nt + 1) * (grid.nq + 1))};
  std::copy(final_values.begin(), final_values.end(), field.row(grid.nt).begin());

  const simd::ReverseStepRow row{advection, reaction, 0.5 * theta2 * dt, dt, 1.0 / (dq * dq), 0.5 / dq};
  for (std::size_t i = grid.nt; i > 0; --i) {
    auto out = field.row(i - 1);
    simd::reverse_step_row(row, field.row(i), out);
    const double t = grid.t(i - 1);
    if (boundary) {
      out.front() = boundary(t, grid.q0);
      out.back() = boundary(t, grid.q1);
    } else {
      const std::size_t n = grid.nq;
      out[0] = out[1] * out[1] / out[2];
      out[n] = out[n - 1] * out[n - 1] / out[n - 2];
    }
  }
  return field;
}

}  // namespace eqm
