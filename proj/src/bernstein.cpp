#include "eqm/bernstein.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <thread>

#include "eqm/error.hpp"
#include "eqm/random.hpp"

namespace eqm {

namespace {

constexpr double kFlag = std::numeric_limits<double>::quiet_NaN();

template <class Fn>
void parallel_over_paths(std::size_t n_paths, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n_paths, 1)));
  if (workers <= 1) {
    fn(std::size_t{0}, n_paths);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n_paths + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n_paths, w * chunk);
    const std::size_t end = std::min(n_paths, begin + chunk);
    if (begin == end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

void check_same_shape(const PathEnsemble& a, const PathEnsemble& b) {
  if (a.n_paths() != b.n_paths()) throw InvalidArgument("ensembles differ in path count");
  const auto& ga = a.grid();
  const auto& gb = b.grid();
  if (ga.t0 != gb.t0 || ga.t_end != gb.t_end || ga.steps != gb.steps) {
    throw InvalidArgument("ensembles live on different time grids");
  }
  if (!std::ranges::equal(a.recorded_steps(), b.recorded_steps())) {
    throw InvalidArgument("ensembles record different steps");
  }
}

}  // namespace

DriftField DriftField::zero() {
  return {[](double, double) { return 0.0; }, std::nullopt};
}

DriftField DriftField::of(const PositiveSolution& sol) {
  return {[sol](double t, double q) { return drift_of(sol, t, q); }, std::nullopt};
}

DriftField DriftField::of(const TransformedSolution& sol) {
  return {[sol](double t, double q) { return process_drift(sol, t, q); }, std::nullopt};
}

void TimeGrid::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(t_end)) throw InvalidArgument("time grid bounds must be finite");
  if (!(t_end > t0)) throw InvalidArgument("time grid requires T > t0");
  if (steps < 1) throw InvalidArgument("time grid requires at least one step");
}

std::size_t TimeGrid::step_at(double t) const {
  if (!(t >= t0 && t <= t_end)) throw InvalidArgument("time " + std::to_string(t) + " outside the grid");
  return static_cast<std::size_t>(std::llround((t - t0) / (t_end - t0) * static_cast<double>(steps)));
}

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t n_paths, std::uint64_t seed,
                           std::vector<std::size_t> recorded_steps)
    : grid_(grid), n_paths_(n_paths), seed_(seed), steps_(std::move(recorded_steps)) {
  grid_.validate();
  if (steps_.empty()) {
    steps_.resize(grid_.steps + 1);
    for (std::size_t k = 0; k <= grid_.steps; ++k) steps_[k] = k;
  } else {
    steps_.push_back(0);
    std::ranges::sort(steps_);
    const auto dup = std::ranges::unique(steps_);
    steps_.erase(dup.begin(), dup.end());
    if (steps_.back() > grid_.steps) {
      throw InvalidArgument("recorded step " + std::to_string(steps_.back()) + " exceeds grid steps " +
                            std::to_string(grid_.steps));
    }
  }
  values_.assign(n_paths_ * steps_.size(), 0.0);
  absorbed_.assign(n_paths_, std::nullopt);
}

std::optional<std::size_t> PathEnsemble::column_of(std::size_t step) const noexcept {
  const auto it = std::ranges::lower_bound(steps_, step);
  if (it == steps_.end() || *it != step) return std::nullopt;
  return static_cast<std::size_t>(it - steps_.begin());
}

std::optional<double> PathEnsemble::value(std::size_t path, std::size_t step) const {
  if (path >= n_paths_) throw InvalidArgument("path index out of range");
  const auto col = column_of(step);
  if (!col) throw InvalidArgument("step " + std::to_string(step) + " was not recorded");
  const auto& absorbed = absorbed_[path];
  if (absorbed && step >= *absorbed) return std::nullopt;
  return values_[path * steps_.size() + *col];
}

void PathEnsemble::mark_absorbed(std::size_t path, std::size_t step) {
  absorbed_.at(path) = step;
  auto r = row(path);
  for (std::size_t c = 0; c < steps_.size(); ++c) {
    if (steps_[c] >= step) r[c] = kFlag;
  }
}

PathEnsemble simulate_scheme(const SchemeStep& step, const std::function<bool(double)>& absorbing, double x0,
                             const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                             const SimulationOptions& options) {
  grid.validate();
  if (!std::isfinite(x0)) throw InvalidArgument("initial value must be finite");
  if (absorbing && absorbing(x0)) throw InvalidArgument("initial value lies inside the guard region");

  PathEnsemble ens(grid, n_paths, seed, options.record_steps);
  const auto recorded = ens.recorded_steps();
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);

  parallel_over_paths(n_paths, options.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> xi(grid.steps);
    for (std::size_t p = begin; p < end; ++p) {
      NormalStream(seed, p).fill(0, xi);
      auto row = ens.row(p);
      std::size_t col = 0;
      double x = x0;
      row[col++] = x;
      for (std::size_t k = 0; k < grid.steps; ++k) {
        x = step(grid.time(k), x, dt, sqrt_dt * xi[k]);
        if ((absorbing && absorbing(x)) || !std::isfinite(x)) {
          ens.mark_absorbed(p, k + 1);
          break;
        }
        if (col < recorded.size() && recorded[col] == k + 1) row[col++] = x;
      }
    }
  });
  return ens;
}

PathEnsemble simulate(const DriftField& drift, double theta, double z0, const TimeGrid& grid, std::size_t n_paths,
                      std::uint64_t seed, const SimulationOptions& options) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw InvalidArgument("theta must be finite and nonnegative");
  if (!drift.eval) throw InvalidArgument("drift field has no evaluator");
  std::function<bool(double)> absorbing;
  if (drift.guard) {
    const Guard g = *drift.guard;
    absorbing = [g](double x) { return g.contains(x); };
  }
  const auto& b = drift.eval;
  return simulate_scheme([&b, theta](double t, double x, double dt, double dw) { return x + b(t, x) * dt + theta * dw; },
                         absorbing, z0, grid, n_paths, seed, options);
}

std::vector<DriftBin> estimate_drift(const PathEnsemble& ens, std::size_t step, const Bins& bins) {
  if (step >= ens.grid().steps) throw InvalidArgument("drift estimation needs step < steps");
  if (bins.count == 0 || !(bins.hi > bins.lo)) throw InvalidArgument("drift estimation needs a nonempty bin range");
  const auto c0 = ens.column_of(step);
  const auto c1 = ens.column_of(step + 1);
  if (!c0 || !c1) throw InvalidArgument("drift estimation needs steps " + std::to_string(step) + " and " +
                                        std::to_string(step + 1) + " recorded");
  const double width = (bins.hi - bins.lo) / static_cast<double>(bins.count);
  const double dt = ens.grid().dt();
  std::vector<double> sums(bins.count, 0.0);
  std::vector<std::size_t> counts(bins.count, 0);
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    const auto absorbed = ens.absorbed_at(p);
    if (absorbed && *absorbed <= step + 1) continue;
    const auto row = ens.row(p);
    const double z = row[*c0];
    if (z < bins.lo || z > bins.hi) continue;
    const std::size_t b = std::min(bins.count - 1, static_cast<std::size_t>((z - bins.lo) / width));
    sums[b] += (row[*c1] - z) / dt;
    ++counts[b];
  }
  std::vector<DriftBin> out;
  for (std::size_t b = 0; b < bins.count; ++b) {
    if (counts[b] < kMinBinCount) continue;
    out.push_back({bins.lo + (static_cast<double>(b) + 0.5) * width, sums[b] / static_cast<double>(counts[b]), counts[b]});
  }
  return out;
}

Moments moments(const PathEnsemble& ens, std::size_t step) {
  const auto col = ens.column_of(step);
  if (!col) throw InvalidArgument("step " + std::to_string(step) + " was not recorded");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    const auto absorbed = ens.absorbed_at(p);
    if (absorbed && *absorbed <= step) continue;
    sum += ens.row(p)[*col];
    ++n;
  }
  if (n == 0) throw InvalidArgument("every path is absorbed at step " + std::to_string(step));
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    const auto absorbed = ens.absorbed_at(p);
    if (absorbed && *absorbed <= step) continue;
    const double d = ens.row(p)[*col] - mean;
    ss += d * d;
  }
  return {mean, n > 1 ? ss / static_cast<double>(n - 1) : 0.0, n};
}

double compare_pathwise(const PathEnsemble& a, const PathEnsemble& b) {
  check_same_shape(a, b);
  double worst = 0.0;
  for (std::size_t p = 0; p < a.n_paths(); ++p) {
    const auto ra = a.row(p);
    const auto rb = b.row(p);
    for (std::size_t c = 0; c < ra.size(); ++c) {
      if (std::isnan(ra[c]) || std::isnan(rb[c])) continue;
      worst = std::max(worst, std::fabs(ra[c] - rb[c]));
    }
  }
  return worst;
}

PathEnsemble pathwise_map_linear(const PathEnsemble& ens, LinearForce f) {
  PathEnsemble out = ens;
  const auto steps = ens.recorded_steps();
  for (std::size_t p = 0; p < out.n_paths(); ++p) {
    auto r = out.row(p);
    for (std::size_t c = 0; c < r.size(); ++c) {
      const double t = ens.grid().time(steps[c]);
      r[c] += 0.5 * f.lambda_force * t * t;
    }
  }
  return out;
}

}  // namespace eqm
