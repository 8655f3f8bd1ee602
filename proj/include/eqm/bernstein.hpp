#pragma once

// Euler-Maruyama simulation of the forward Bernstein SDE
//   dz = theta dw + B(t, z) dt
// with counter-based noise, plus ensemble statistics.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "eqm/solutions.hpp"
#include "eqm/transforms.hpp"

namespace eqm {

/// Radius of the excluded neighbourhood around a drift singularity.
inline constexpr double kGuardFloor = 1e-8;
/// Bins with fewer samples are dropped by estimate_drift.
inline constexpr std::size_t kMinBinCount = 100;

/// Excluded region |q - center| < radius.
struct Guard {
  double center = 0.0;
  double radius = kGuardFloor;

  bool contains(double q) const noexcept { return std::fabs(q - center) < radius; }
};

struct DriftField {
  std::function<double(double, double)> eval;
  std::optional<Guard> guard;

  static DriftField zero();
  static DriftField of(const PositiveSolution& sol);
  /// Process drift of a transformed solution (vector potential removed).
  static DriftField of(const TransformedSolution& sol);
};

struct TimeGrid {
  double t0;
  double t_end;
  std::size_t steps;

  void validate() const;
  double dt() const noexcept { return (t_end - t0) / static_cast<double>(steps); }
  double time(std::size_t k) const noexcept {
    return t0 + (t_end - t0) * static_cast<double>(k) / static_cast<double>(steps);
  }
  /// Nearest step index to time t.
  std::size_t step_at(double t) const;
};

/// Sample paths on a shared grid. Only the recorded steps are stored; by
/// default every step 0..steps is recorded. Entries at and after a path's
/// absorption step are flagged (NaN) and reported as absent.
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, std::size_t n_paths, std::uint64_t seed, std::vector<std::size_t> recorded_steps);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const std::size_t> recorded_steps() const noexcept { return steps_; }
  bool records(std::size_t step) const noexcept { return column_of(step).has_value(); }
  std::optional<std::size_t> column_of(std::size_t step) const noexcept;

  std::optional<double> value(std::size_t path, std::size_t step) const;
  std::optional<std::size_t> absorbed_at(std::size_t path) const { return absorbed_.at(path); }

  std::span<const double> row(std::size_t path) const {
    return std::span(values_).subspan(path * steps_.size(), steps_.size());
  }
  std::span<double> row(std::size_t path) { return std::span(values_).subspan(path * steps_.size(), steps_.size()); }

  /// Flags the path from `step` on.
  void mark_absorbed(std::size_t path, std::size_t step);

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::uint64_t seed_;
  std::vector<std::size_t> steps_;
  std::vector<double> values_;
  std::vector<std::optional<std::size_t>> absorbed_;
};

struct SimulationOptions {
  /// Steps to store; empty means all. Step 0 is always stored.
  std::vector<std::size_t> record_steps;
  /// Worker threads; 0 picks hardware concurrency. Output never depends on it.
  unsigned workers = 0;
};

/// One Euler step x_{k+1} = step(t_k, x_k, dt, dw) with dw = sqrt(dt) * xi.
using SchemeStep = std::function<double(double, double, double, double)>;

/// Generic fixed-step scheme driver. Path p draws its noise for step k from
/// NormalStream(seed, p).at(k). A path whose new state satisfies `absorbing`
/// is marked absorbed at that step.
PathEnsemble simulate_scheme(const SchemeStep& step, const std::function<bool(double)>& absorbing, double x0,
                             const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                             const SimulationOptions& options = {});

/// Euler-Maruyama for dz = theta dw + B(t, z) dt. theta = 0 gives the ODE limit.
PathEnsemble simulate(const DriftField& drift, double theta, double z0, const TimeGrid& grid, std::size_t n_paths,
                      std::uint64_t seed, const SimulationOptions& options = {});

struct Bins {
  double lo;
  double hi;
  std::size_t count;
};

struct DriftBin {
  double center;
  double estimate;
  std::size_t count;
};

/// Binned mean of (z_{step+1} - z_step) / dt keyed on z_step. Paths absorbed
/// by step+1 are skipped; bins with fewer than kMinBinCount samples are omitted.
std::vector<DriftBin> estimate_drift(const PathEnsemble& ens, std::size_t step, const Bins& bins);

struct Moments {
  double mean;
  double variance;  // unbiased; 0 for a single path
  std::size_t count;
};

/// Mean and variance at `step` over unabsorbed paths.
Moments moments(const PathEnsemble& ens, std::size_t step);

/// sup over paths and recorded steps of |a - b|, skipping flagged entries.
double compare_pathwise(const PathEnsemble& a, const PathEnsemble& b);

/// Applies z -> z + lambda t^2 / 2 to every stored value.
PathEnsemble pathwise_map_linear(const PathEnsemble& ens, LinearForce f);

}  // namespace eqm
