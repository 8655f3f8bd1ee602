#include "eqm/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eqm/error.hpp"

namespace eqm {

void AffineRateModel::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(phi) || !std::isfinite(lambda_mr)) {
    throw InvalidArgument("affine model parameters must be finite");
  }
  if (!(alpha > 0.0)) throw InvalidArgument("affine model requires alpha > 0, got " + std::to_string(alpha));
  if (beta < 0.0) throw InvalidArgument("affine model requires beta >= 0, got " + std::to_string(beta));
}

DriftField BernsteinImage::drift_field() const {
  const InverseLinearDrift b{drift_c1, drift_c2};
  return {[b](double, double q) { return b(q); }, Guard{0.0, kGuardFloor}};
}

BernsteinImage to_bernstein(const AffineRateModel& m) {
  m.validate();
  const double a = m.alpha;
  const double pt = m.phi_tilde();
  return BernsteinImage{
      Theta(a / 2.0),
      pt,
      a * a / 8.0 * (pt - a / 4.0) * (pt - 3.0 * a / 4.0),
      m.lambda_mr * m.lambda_mr / 8.0,
      a * (pt - a / 4.0) / 2.0,
      -m.lambda_mr / 2.0,
  };
}

IsovectorDim classify(const AffineRateModel& m, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument("classification tolerance must be nonnegative");
  const BernsteinImage img = to_bernstein(m);
  const double a = m.alpha;
  if (img.phi_tilde - a / 4.0 == 0.0 || img.phi_tilde - 3.0 * a / 4.0 == 0.0) return IsovectorDim::Six;
  return std::fabs(img.inv_sq_A) <= tol * a * a ? IsovectorDim::Six : IsovectorDim::Four;
}

PathEnsemble simulate_rate(const AffineRateModel& m, double r0, const TimeGrid& grid, std::size_t n_paths,
                           std::uint64_t seed, const SimulationOptions& options) {
  m.validate();
  if (!std::isfinite(r0) || m.alpha * r0 + m.beta < 0.0) {
    throw InvalidArgument("initial rate must satisfy alpha r0 + beta >= 0");
  }
  const AffineRateModel model = m;
  return simulate_scheme(
      [model](double, double r, double dt, double dw) {
        const double vol = std::sqrt(std::max(model.alpha * r + model.beta, 0.0));
        return r + (model.phi - model.lambda_mr * r) * dt + vol * dw;
      },
      nullptr, r0, grid, n_paths, seed, options);
}

double rate_mean(const AffineRateModel& m, double r0, double t) {
  if (m.lambda_mr == 0.0) return r0 + m.phi * t;
  const double level = m.phi / m.lambda_mr;
  return level + (r0 - level) * std::exp(-m.lambda_mr * t);
}

PathEnsemble z_of_rate(const AffineRateModel& m, const PathEnsemble& rates) {
  m.validate();
  PathEnsemble z = rates;
  const auto steps = rates.recorded_steps();
  const double floor2 = kGuardFloor * kGuardFloor;
  for (std::size_t p = 0; p < z.n_paths(); ++p) {
    auto row = z.row(p);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::isnan(row[c])) break;
      const double x = m.alpha * row[c] + m.beta;
      if (x <= floor2) {
        z.mark_absorbed(p, steps[c]);
        break;
      }
      row[c] = std::sqrt(x);
    }
  }
  return z;
}

PotentialSpec hjb_potential(const InverseLinearDrift& b, Theta theta) {
  // b^2/2 = c1^2/(2q^2) + c1 c2 + c2^2 q^2 / 2 ;  (theta^2/2) b' = -(theta^2/2) c1/q^2 + (theta^2/2) c2.
  // The constants c1 c2 + theta^2 c2 / 2 are absorbed into the energy.
  return {0.5 * b.c1 * (b.c1 - theta.squared()), 0.5 * b.c2 * b.c2, 0.0, 0.0};
}

}  // namespace eqm
