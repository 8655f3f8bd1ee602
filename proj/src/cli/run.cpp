#include "eqm/cli/run.hpp"

#include <fstream>

#include <json.hpp>

#include "eqm/acceptance.hpp"
#include "eqm/bernstein.hpp"
#include "eqm/cli/csv.hpp"
#include "eqm/rates.hpp"
#include "eqm/solutions.hpp"
#include "eqm/transforms.hpp"

namespace eqm::cli {

namespace {

using nlohmann::ordered_json;

void write_json(const ordered_json& j, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << j.dump(2) << '\n';
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

std::filesystem::path require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("missing required key 'out'");
  return cfg.out;
}

PositiveSolution make_solution(const RunConfig& cfg, Theta theta) {
  switch (cfg.solution.kind) {
    case SolutionSelector::Kind::Constant:
      return PositiveSolution::constant(theta);
    case SolutionSelector::Kind::Exponential:
      return PositiveSolution::exponential(theta, cfg.solution.parameter);
    case SolutionSelector::Kind::Kernel:
      return PositiveSolution::reversed_kernel(theta, cfg.solution.parameter, 0.0, cfg.t0);
  }
  throw ConfigError("key 'solution': unsupported selector");
}

std::optional<TransformedSolution> make_transform(const RunConfig& cfg, const PositiveSolution& base) {
  if (cfg.lambda_force) return linear_transform(base, LinearForce{*cfg.lambda_force}, base.theta());
  if (cfg.omega) return quadratic_transform(base, OscillatorFreq{*cfg.omega}, base.theta());
  if (cfg.beta_rate) return ou_transform(base, DriftRate{*cfg.beta_rate}, base.theta());
  return std::nullopt;
}

ordered_json potential_json(const TargetEquation& eq) {
  return {{"inv_sq", eq.potential.inv_sq}, {"quad", eq.potential.quad}, {"lin", eq.potential.lin},
          {"const", eq.potential.constant}, {"vec_a", eq.drift.a},     {"vec_b", eq.drift.b}};
}

ordered_json moments_json(const PathEnsemble& ens) {
  ordered_json rows = ordered_json::array();
  for (std::size_t step : ens.recorded_steps()) {
    ordered_json row{{"step", step}, {"t", ens.grid().time(step)}};
    bool any = false;
    for (std::size_t p = 0; p < ens.n_paths() && !any; ++p) any = ens.value(p, step).has_value();
    if (any) {
      const Moments m = moments(ens, step);
      row["mean"] = m.mean;
      row["variance"] = m.variance;
      row["count"] = m.count;
    } else {
      row["mean"] = nullptr;
      row["variance"] = nullptr;
      row["count"] = 0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_simulate(const RunConfig& cfg) {
  const auto out = require_out(cfg);
  const TimeGrid grid{cfg.t0, cfg.t_end, cfg.steps};
  const SimulationOptions options{{}, cfg.workers};
  ordered_json summary{{"command", "simulate"}, {"seed", cfg.seed}, {"paths", cfg.paths}, {"steps", cfg.steps}};

  if (cfg.process == Process::Rate) {
    const AffineRateModel model{*cfg.alpha, *cfg.beta, *cfg.phi, *cfg.lambda_mr};
    const auto rates = simulate_rate(model, *cfg.r0, grid, cfg.paths, cfg.seed, options);
    write_csv(rates, csv_path(out));
    summary["process"] = "rate";
    summary["moments"] = moments_json(rates);
    ordered_json exact = ordered_json::array();
    for (std::size_t k : rates.recorded_steps()) exact.push_back(rate_mean(model, *cfg.r0, grid.time(k)));
    summary["exact_mean"] = exact;
  } else {
    const Theta theta(*cfg.theta);
    const auto base = make_solution(cfg, theta);
    const auto transformed = make_transform(cfg, base);
    const DriftField drift = transformed ? DriftField::of(*transformed) : DriftField::of(base);
    const auto ens = simulate(drift, theta.value(), *cfg.z0, grid, cfg.paths, cfg.seed, options);
    write_csv(ens, csv_path(out));
    summary["process"] = "bernstein";
    summary["moments"] = moments_json(ens);
  }
  write_json(summary, json_path(out));
  return kSuccess;
}

int run_transform(const RunConfig& cfg) {
  const auto out = require_out(cfg);
  const Theta theta(*cfg.theta);
  const auto base = make_solution(cfg, theta);
  const auto sol = *make_transform(cfg, base);
  const GridSpec grid{cfg.t0, cfg.t_end, cfg.steps, cfg.q0, cfg.q1, cfg.nq};
  grid.validate();

  std::vector<GridRow> rows;
  rows.reserve((grid.nt + 1) * (grid.nq + 1));
  for (std::size_t i = 0; i <= grid.nt; ++i) {
    for (std::size_t j = 0; j <= grid.nq; ++j) {
      const double t = grid.t(i);
      const double q = grid.q(j);
      rows.push_back({t, q, eval(sol, t, q), process_drift(sol, t, q)});
    }
  }
  write_csv(rows, csv_path(out));

  auto f = [&sol](double t, double q) { return eval(sol, t, q); };
  const double r1 = pde_residual(sample_field(grid, f), sol.target(), theta);
  const double r2 = pde_residual(sample_field(grid.refined(), f), sol.target(), theta);
  const ordered_json summary{{"command", "transform"},
                             {"target", potential_json(sol.target())},
                             {"grid", {{"t0", grid.t0}, {"t1", grid.t1}, {"nt", grid.nt},
                                       {"q0", grid.q0}, {"q1", grid.q1}, {"nq", grid.nq}}},
                             {"residual", r1},
                             {"residual_refined", r2},
                             {"ratio", r2 > 0.0 ? ordered_json(r1 / r2) : ordered_json(nullptr)}};
  write_json(summary, json_path(out));
  return kSuccess;
}

int run_classify(const RunConfig& cfg) {
  const auto out = require_out(cfg);
  const AffineRateModel model{*cfg.alpha, *cfg.beta, *cfg.phi, *cfg.lambda_mr};
  const auto img = to_bernstein(model);
  const ordered_json summary{{"command", "classify"},
                             {"phi_tilde", img.phi_tilde},
                             {"A", img.inv_sq_A},
                             {"B", img.quad_B},
                             {"dimension", static_cast<int>(classify(model))},
                             {"theta", img.theta.value()},
                             {"drift_c1", img.drift_c1},
                             {"drift_c2", img.drift_c2}};
  write_json(summary, json_path(out));
  return kSuccess;
}

int run_verify(const RunConfig& cfg) {
  const auto out = require_out(cfg);
  const acceptance::Options opt{cfg.seed, cfg.workers};
  auto checks = acceptance::run_all(opt);
  for (auto& c : acceptance::run_invariants(opt)) checks.push_back(std::move(c));
  bool all = true;
  ordered_json list = ordered_json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    list.push_back(acceptance::to_json(c));
  }
  write_json({{"command", "verify"}, {"seed", cfg.seed}, {"passed", all}, {"checks", list}}, json_path(out));
  return all ? kSuccess : kVerificationFailure;
}

}  // namespace

std::filesystem::path csv_path(const std::filesystem::path& out) {
  return std::filesystem::path(out).replace_extension(".csv");
}

std::filesystem::path json_path(const std::filesystem::path& out) {
  return std::filesystem::path(out).replace_extension(".json");
}

int run(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Simulate:
      return run_simulate(cfg);
    case Command::Transform:
      return run_transform(cfg);
    case Command::Classify:
      return run_classify(cfg);
    case Command::Verify:
      return run_verify(cfg);
  }
  return kValidationError;
}

int exit_status_for(const std::exception& e) noexcept {
  if (dynamic_cast<const IoError*>(&e)) return kIoError;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kIoError;
  return kValidationError;
}

}  // namespace eqm::cli
