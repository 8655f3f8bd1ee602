#include "eqm/transforms.hpp"

#include <cmath>
#include <string>

#include "eqm/error.hpp"

namespace eqm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool negligible(double p) noexcept { return std::fabs(p) < kRemovableSingularityThreshold; }

// (e^{2 beta t} - 1) / (2 beta), with the beta -> 0 limit t.
double ou_clock(double beta, double t) noexcept {
  return negligible(beta) ? t : std::expm1(2.0 * beta * t) / (2.0 * beta);
}

// tanh(omega t) / omega, with the omega -> 0 limit t.
double oscillator_clock(double omega, double t) noexcept {
  return negligible(omega) ? t : std::tanh(omega * t) / omega;
}

void check_theta(const PositiveSolution& base, Theta theta) {
  if (base.theta().value() != theta.value()) {
    throw InvalidArgument("transform theta differs from the base solution's theta");
  }
}

void require_base_domain(const PositiveSolution& base, double s, double x, double t, double q) {
  if (!base.in_domain(s, x)) {
    throw DomainError("transformed argument (" + std::to_string(s) + ", " + std::to_string(x) +
                      ") for (t, q) = (" + std::to_string(t) + ", " + std::to_string(q) +
                      ") lies outside the base solution's domain");
  }
}

}  // namespace

TransformedSolution::TransformedSolution(PositiveSolution base, Tag tag) : base_(std::move(base)), tag_(tag) {
  std::visit(Overloaded{
                 [](LinearForce f) {
                   if (!std::isfinite(f.lambda_force)) throw InvalidArgument("lambda_force must be finite");
                 },
                 [](OscillatorFreq f) {
                   if (!(f.omega >= 0.0) || !std::isfinite(f.omega)) {
                     throw InvalidArgument("omega must be finite and nonnegative");
                   }
                 },
                 [](DriftRate f) {
                   if (!std::isfinite(f.beta_rate)) throw InvalidArgument("beta_rate must be finite");
                 },
             },
             tag_);
}

TargetEquation TransformedSolution::target() const {
  const double theta2 = theta().squared();
  return std::visit(Overloaded{
                        [](LinearForce f) { return TargetEquation{PotentialSpec{0.0, 0.0, f.lambda_force, 0.0}, {}}; },
                        [](OscillatorFreq f) {
                          return TargetEquation{PotentialSpec{0.0, 0.5 * f.omega * f.omega, 0.0, 0.0}, {}};
                        },
                        [&](DriftRate f) { return TargetEquation{PotentialSpec{}, VectorDrift{theta2 * f.beta_rate, 0.0}}; },
                    },
                    tag_);
}

std::pair<double, double> TransformedSolution::base_argument(double t, double q) const {
  return std::visit(Overloaded{
                        [&](LinearForce f) { return std::pair{t, q - 0.5 * f.lambda_force * t * t}; },
                        [&](OscillatorFreq f) {
                          if (negligible(f.omega)) return std::pair{t, q};
                          return std::pair{oscillator_clock(f.omega, t), q / std::cosh(f.omega * t)};
                        },
                        [&](DriftRate f) {
                          if (negligible(f.beta_rate)) return std::pair{t, q};
                          return std::pair{ou_clock(f.beta_rate, t), std::exp(f.beta_rate * t) * q};
                        },
                    },
                    tag_);
}

bool TransformedSolution::in_domain(double t, double q) const noexcept {
  if (!std::isfinite(t) || !std::isfinite(q)) return false;
  const auto [s, x] = base_argument(t, q);
  return base_.in_domain(s, x);
}

double TransformedSolution::log_value(double t, double q) const {
  const auto [s, x] = base_argument(t, q);
  require_base_domain(base_, s, x, t, q);
  const double theta2 = theta().squared();
  const double inner = base_.log_value(s, x);
  return std::visit(Overloaded{
                        [&](LinearForce f) {
                          const double l = f.lambda_force;
                          return -l * l * t * t * t / (6.0 * theta2) + l * t * q / theta2 + inner;
                        },
                        [&](OscillatorFreq f) {
                          if (negligible(f.omega)) return inner;
                          const double wt = f.omega * t;
                          return -0.5 * std::log(std::cosh(wt)) + f.omega * q * q * std::tanh(wt) / (2.0 * theta2) + inner;
                        },
                        [&](DriftRate) { return inner; },
                    },
                    tag_);
}

double TransformedSolution::log_derivative(double t, double q) const {
  const auto [s, x] = base_argument(t, q);
  require_base_domain(base_, s, x, t, q);
  const double theta2 = theta().squared();
  const double inner = base_.log_derivative(s, x);
  return std::visit(Overloaded{
                        [&](LinearForce f) { return f.lambda_force * t / theta2 + inner; },
                        [&](OscillatorFreq f) {
                          if (negligible(f.omega)) return inner;
                          const double wt = f.omega * t;
                          return f.omega * q * std::tanh(wt) / theta2 + inner / std::cosh(wt);
                        },
                        [&](DriftRate f) {
                          if (negligible(f.beta_rate)) return inner;
                          return std::exp(f.beta_rate * t) * inner;
                        },
                    },
                    tag_);
}

double eval(const TransformedSolution& sol, double t, double q) { return std::exp(sol.log_value(t, q)); }

double drift_of(const TransformedSolution& sol, double t, double q) {
  return sol.theta().squared() * sol.log_derivative(t, q);
}

TransformedSolution linear_transform(const PositiveSolution& base, LinearForce f, Theta theta) {
  check_theta(base, theta);
  return {base, f};
}

TransformedSolution quadratic_transform(const PositiveSolution& base, OscillatorFreq f, Theta theta) {
  check_theta(base, theta);
  return {base, f};
}

TransformedSolution ou_transform(const PositiveSolution& base, DriftRate f, Theta theta) {
  check_theta(base, theta);
  return {base, f};
}

double linear_drift(const PositiveSolution& base, LinearForce f, Theta theta, double t, double q) {
  check_theta(base, theta);
  const double l = f.lambda_force;
  const double shifted = q - 0.5 * l * t * t;
  require_base_domain(base, t, shifted, t, q);
  return l * t + drift_of(base, t, shifted);
}

double quadratic_drift(const PositiveSolution& base, OscillatorFreq f, Theta theta, double t, double q) {
  check_theta(base, theta);
  if (!(f.omega >= 0.0)) throw InvalidArgument("omega must be nonnegative");
  if (negligible(f.omega)) {
    require_base_domain(base, t, q, t, q);
    return drift_of(base, t, q);
  }
  const double wt = f.omega * t;
  const double c = std::cosh(wt);
  const double s = oscillator_clock(f.omega, t);
  require_base_domain(base, s, q / c, t, q);
  return f.omega * q * std::tanh(wt) + drift_of(base, s, q / c) / c;
}

double ou_drift(const PositiveSolution& base, DriftRate f, Theta theta, double t, double q) {
  check_theta(base, theta);
  const double beta = f.beta_rate;
  if (negligible(beta)) {
    require_base_domain(base, t, q, t, q);
    return drift_of(base, t, q) - beta * q;
  }
  const double scale = std::exp(beta * t);
  const double s = ou_clock(beta, t);
  require_base_domain(base, s, scale * q, t, q);
  return scale * drift_of(base, s, scale * q) - beta * q;
}

double process_drift(const TransformedSolution& sol, double t, double q) {
  return std::visit(Overloaded{
                        [&](LinearForce f) { return linear_drift(sol.base(), f, sol.theta(), t, q); },
                        [&](OscillatorFreq f) { return quadratic_drift(sol.base(), f, sol.theta(), t, q); },
                        [&](DriftRate f) { return ou_drift(sol.base(), f, sol.theta(), t, q); },
                    },
                    sol.tag());
}

std::vector<TimedSample> pathwise_map_linear(std::span<const TimedSample> path, LinearForce f) {
  std::vector<TimedSample> out;
  out.reserve(path.size());
  for (const auto& s : path) out.push_back({s.t, s.z + 0.5 * f.lambda_force * s.t * s.t});
  return out;
}

}  // namespace eqm
