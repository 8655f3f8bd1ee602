#include "eqm/acceptance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "eqm/bernstein.hpp"
#include "eqm/rates.hpp"
#include "eqm/simd/dispatch.hpp"
#include "eqm/simd/kernels.hpp"
#include "eqm/solutions.hpp"
#include "eqm/transforms.hpp"

namespace eqm::acceptance {

namespace {

using nlohmann::ordered_json;

// FNV-1a over the stored bit patterns and absorption indices.
std::string digest(const PathEnsemble& ens) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ull;
    }
  };
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    const auto row = ens.row(p);
    mix(row.data(), row.size_bytes());
    const std::uint64_t a = ens.absorbed_at(p).value_or(std::numeric_limits<std::uint64_t>::max());
    mix(&a, sizeof a);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SimulationOptions record(const Options& opt, std::vector<std::size_t> steps = {}) {
  return SimulationOptions{std::move(steps), opt.workers};
}

CheckResult make(std::string id, std::string name) {
  CheckResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.metrics = ordered_json::object();
  return r;
}

}  // namespace

CheckResult pathwise_linear_identity(const Options& opt) {
  auto r = make("1", "linear potential pathwise identity z_V = z + lambda t^2/2");
  const Theta theta(1.0);
  const LinearForce force{1.0};
  const auto base = PositiveSolution::reversed_kernel(theta, 2.0);
  const auto transformed = linear_transform(base, force, theta);
  constexpr std::size_t kPaths = 1000;

  auto deviation = [&](std::size_t steps) {
    const TimeGrid grid{0.0, 1.0, steps};
    const auto free = simulate(DriftField::of(base), theta.value(), 0.0, grid, kPaths, opt.seed, record(opt));
    const auto direct = simulate(DriftField::of(transformed), theta.value(), 0.0, grid, kPaths, opt.seed, record(opt));
    const auto mapped = pathwise_map_linear(free, force);
    r.metrics["digest_steps_" + std::to_string(steps)] = digest(direct) + digest(mapped);
    return compare_pathwise(direct, mapped);
  };
  const double fine = deviation(1000);
  const double coarse = deviation(100);
  const double bound = 5.0 * 1e-3;
  r.metrics["sup_deviation_dt_1e-3"] = fine;
  r.metrics["sup_deviation_dt_1e-2"] = coarse;
  r.metrics["coarse_to_fine_ratio"] = coarse / fine;
  r.measured = fine;
  r.threshold = bound;
  r.passed = fine <= bound && coarse >= 2.0 * fine;
  return r;
}

CheckResult ornstein_uhlenbeck_moments(const Options& opt) {
  auto r = make("2", "Ornstein-Uhlenbeck moments from the gradient-drift transform");
  const Theta theta(1.0);
  const auto sol = ou_transform(PositiveSolution::constant(theta), DriftRate{1.0}, theta);
  constexpr std::size_t kPaths = 100000;
  const TimeGrid grid{0.0, 2.0, 2000};
  const auto ens = simulate(DriftField::of(sol), theta.value(), 2.0, grid, kPaths, opt.seed, record(opt, {2000}));
  const Moments m = moments(ens, 2000);
  const double n = static_cast<double>(kPaths);
  const double v = (1.0 - std::exp(-4.0)) / 2.0;
  const double mean_exact = 2.0 * std::exp(-2.0);
  const double mean_err = std::fabs(m.mean - mean_exact);
  const double var_err = std::fabs(m.variance - v);
  const double mean_tol = 3.0 * std::sqrt(v / n);
  const double var_tol = 3.0 * v * std::sqrt(2.0 / n);
  r.metrics["mean"] = m.mean;
  r.metrics["mean_exact"] = mean_exact;
  r.metrics["mean_tolerance"] = mean_tol;
  r.metrics["variance"] = m.variance;
  r.metrics["variance_exact"] = v;
  r.metrics["variance_tolerance"] = var_tol;
  r.metrics["digest"] = digest(ens);
  r.measured = std::max(mean_err / mean_tol, var_err / var_tol);
  r.threshold = 1.0;
  r.passed = mean_err <= mean_tol && var_err <= var_tol;
  return r;
}

CheckResult pde_certification(const Options&) {
  auto r = make("3", "transformed solutions certified against their PDEs at second order");
  const Theta theta(1.0);
  const auto base = PositiveSolution::exponential(theta, 1.0);
  const std::array<std::pair<const char*, TransformedSolution>, 3> cases{{
      {"linear", linear_transform(base, LinearForce{1.0}, theta)},
      {"quadratic", quadratic_transform(base, OscillatorFreq{1.0}, theta)},
      {"gradient_drift", ou_transform(base, DriftRate{0.5}, theta)},
  }};
  const GridSpec coarse{0.0, 1.0, 100, -1.0, 1.0, 200};
  bool ok = true;
  double worst = 0.0;
  for (const auto& [name, sol] : cases) {
    auto f = [&sol](double t, double q) { return eval(sol, t, q); };
    const double r1 = pde_residual(sample_field(coarse, f), sol.target(), theta);
    const double r2 = pde_residual(sample_field(coarse.refined(), f), sol.target(), theta);
    const double ratio = r1 / r2;
    ok = ok && r1 <= 1e-3 && ratio >= 2.5 && ratio <= 6.0;
    worst = std::max(worst, r1);
    r.metrics[name] = {{"residual", r1}, {"residual_refined", r2}, {"ratio", ratio}};
  }
  r.measured = worst;
  r.threshold = 1e-3;
  r.passed = ok;
  return r;
}

namespace {

AffineRateModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> alpha(0.1, 5.0), beta(0.0, 2.0), phi(-2.0, 2.0), lambda(-2.0, 2.0);
  const double a = alpha(rng);
  const double b = beta(rng);
  const double p = phi(rng);
  const double l = lambda(rng);
  return {a, b, p, l};
}

double relative_error(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), std::numeric_limits<double>::min());
}

}  // namespace

CheckResult affine_closure(const Options& opt) {
  auto r = make("4", "HJB potential of the Ito drift reproduces A and B");
  std::mt19937_64 rng(opt.seed);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto model = random_model(rng);
    const auto img = to_bernstein(model);
    const auto pot = hjb_potential({img.drift_c1, img.drift_c2}, img.theta);
    worst = std::max({worst, relative_error(pot.inv_sq, img.inv_sq_A), relative_error(pot.quad, img.quad_B)});
  }
  r.metrics["models"] = 100;
  r.metrics["max_relative_error"] = worst;
  r.measured = worst;
  r.threshold = 1e-10;
  r.passed = worst <= 1e-10;
  return r;
}

CheckResult isovector_dichotomy(const Options& opt) {
  auto r = make("5", "isovector dimension is 6 exactly when A = 0");
  std::mt19937_64 rng(opt.seed ^ 0x5eed5eed5eed5eedull);
  std::size_t wrong_random = 0;
  std::size_t wrong_constructed = 0;
  for (int i = 0; i < 1000; ++i) {
    AffineRateModel m{};
    // Redraw the (measure-zero in exact arithmetic) near-root models.
    do {
      m = random_model(rng);
    } while (std::min(std::fabs(m.phi_tilde() - m.alpha / 4.0), std::fabs(m.phi_tilde() - 3.0 * m.alpha / 4.0)) <=
             1e-6 * m.alpha);
    if (classify(m) != IsovectorDim::Four) ++wrong_random;
  }
  for (int i = 0; i < 50; ++i) {
    AffineRateModel m = random_model(rng);
    const double target = (i % 2 == 0) ? m.alpha / 4.0 : 3.0 * m.alpha / 4.0;
    m.phi = target - m.lambda_mr * m.beta / m.alpha;
    if (classify(m) != IsovectorDim::Six) ++wrong_constructed;
  }
  r.metrics["random_models"] = 1000;
  r.metrics["random_misclassified"] = wrong_random;
  r.metrics["constructed_models"] = 50;
  r.metrics["constructed_misclassified"] = wrong_constructed;
  r.measured = static_cast<double>(wrong_random + wrong_constructed);
  r.threshold = 0.0;
  r.passed = wrong_random == 0 && wrong_constructed == 0;
  return r;
}

CheckResult affine_monte_carlo(const Options& opt) {
  auto r = make("6", "affine model: empirical z drift and rate mean");
  const AffineRateModel model{2.0, 0.04, 0.06, 0.8};
  const double r0 = 0.05;
  constexpr std::size_t kPaths = 100000;
  const TimeGrid grid{0.0, 1.0, 1000};
  constexpr std::size_t kDriftStep = 250;
  const std::vector<std::size_t> mean_steps{250, 500, 1000};
  std::vector<std::size_t> rec = mean_steps;
  rec.push_back(kDriftStep);
  rec.push_back(kDriftStep + 1);
  const auto rates = simulate_rate(model, r0, grid, kPaths, opt.seed, record(opt, rec));
  const auto z = z_of_rate(model, rates);
  const auto img = to_bernstein(model);
  r.metrics["digest"] = digest(rates);

  bool ok = true;
  double worst = 0.0;
  ordered_json means = ordered_json::array();
  for (std::size_t step : mean_steps) {
    const double t = grid.time(step);
    const Moments m = moments(rates, step);
    const double se = std::sqrt(m.variance / static_cast<double>(m.count));
    const double exact = rate_mean(model, r0, t);
    const double z_score = std::fabs(m.mean - exact) / se;
    ok = ok && z_score <= 3.0;
    worst = std::max(worst, z_score);
    means.push_back({{"t", t}, {"mean", m.mean}, {"exact", exact}, {"std_error", se}, {"z_score", z_score}});
  }
  r.metrics["rate_mean"] = means;

  // Central 80% of the range of surviving z at the estimation step.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t p = 0; p < z.n_paths(); ++p) {
    if (const auto v = z.value(p, kDriftStep)) {
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  }
  const double span = hi - lo;
  const Bins bins{lo + 0.1 * span, hi - 0.1 * span, 20};
  const auto est = estimate_drift(z, kDriftStep, bins);
  const InverseLinearDrift exact{img.drift_c1, img.drift_c2};
  const double dt = grid.dt();
  ordered_json rows = ordered_json::array();
  for (const auto& b : est) {
    const double se = img.theta.value() / std::sqrt(static_cast<double>(b.count) * dt);
    const double z_score = std::fabs(b.estimate - exact(b.center)) / se;
    ok = ok && z_score <= 3.0;
    worst = std::max(worst, z_score);
    rows.push_back({{"center", b.center}, {"estimate", b.estimate}, {"exact", exact(b.center)}, {"count", b.count},
                    {"z_score", z_score}});
  }
  ok = ok && !est.empty();
  r.metrics["drift_time"] = grid.time(kDriftStep);
  r.metrics["drift_bins"] = rows;
  r.measured = worst;
  r.threshold = 3.0;
  r.passed = ok;
  return r;
}

CheckResult bridge_variance(const Options& opt) {
  auto r = make("7", "Brownian bridge variance from the reversed heat kernel");
  const Theta theta(1.0);
  const auto kernel = PositiveSolution::reversed_kernel(theta, 1.0);
  constexpr std::size_t kPaths = 100000;
  const TimeGrid grid{0.0, 1.0, 1000};
  const auto ens = simulate(DriftField::of(kernel), theta.value(), 0.0, grid, kPaths, opt.seed, record(opt, {500}));
  const Moments m = moments(ens, 500);
  const double exact = 0.25;
  const double se = exact * std::sqrt(2.0 / static_cast<double>(kPaths));
  r.metrics["variance"] = m.variance;
  r.metrics["exact"] = exact;
  r.metrics["std_error"] = se;
  r.metrics["digest"] = digest(ens);
  r.measured = std::fabs(m.variance - exact) / se;
  r.threshold = 3.0;
  r.passed = r.measured <= 3.0;
  return r;
}

std::vector<CheckResult> run_criteria(const Options& opt) {
  return {pathwise_linear_identity(opt), ornstein_uhlenbeck_moments(opt), pde_certification(opt),
          affine_closure(opt),           isovector_dichotomy(opt),        affine_monte_carlo(opt),
          bridge_variance(opt)};
}

CheckResult determinism(const Options& opt, const std::vector<CheckResult>& first) {
  auto r = make("8", "identical seeds give byte-identical artifacts");
  Options again = opt;
  again.workers = (opt.workers == 3) ? 1 : 3;
  const auto second = run_criteria(again);
  std::size_t mismatches = first.size() == second.size() ? 0 : 1;
  for (std::size_t i = 0; i < std::min(first.size(), second.size()); ++i) {
    if (serialize(first[i]) != serialize(second[i])) ++mismatches;
  }
  r.metrics["rerun_workers"] = again.workers;
  r.metrics["artifacts_compared"] = first.size();
  r.metrics["mismatches"] = mismatches;
  r.measured = static_cast<double>(mismatches);
  r.threshold = 0.0;
  r.passed = mismatches == 0;
  return r;
}

std::vector<CheckResult> run_all(const Options& opt) {
  auto results = run_criteria(opt);
  results.push_back(determinism(opt, results));
  return results;
}

std::vector<CheckResult> run_invariants(const Options& opt) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(opt.seed);
  const Theta theta(1.0);

  {
    auto r = make("I1", "dedicated transform drifts equal theta^2 d/dq ln eta^V");
    const std::vector<PositiveSolution> bases{
        PositiveSolution::constant(theta), PositiveSolution::exponential(theta, 1.0),
        PositiveSolution::reversed_kernel(theta, 10.0, 0.3),
        PositiveSolution::mixture({0.4, 1.5}, {PositiveSolution::exponential(theta, -0.7),
                                               PositiveSolution::reversed_kernel(theta, 8.0, -0.2)})};
    std::uniform_real_distribution<double> ut(0.0, 1.0), uq(-2.0, 2.0);
    double worst = 0.0;
    for (const auto& base : bases) {
      const std::array<TransformedSolution, 3> ts{linear_transform(base, LinearForce{1.0}, theta),
                                                  quadratic_transform(base, OscillatorFreq{1.0}, theta),
                                                  ou_transform(base, DriftRate{0.5}, theta)};
      for (const auto& sol : ts) {
        for (int i = 0; i < 100; ++i) {
          const double t = ut(rng);
          const double q = uq(rng);
          double composed = drift_of(sol, t, q);
          if (const auto* d = std::get_if<DriftRate>(&sol.tag())) composed -= d->beta_rate * q;
          worst = std::max(worst, std::fabs(process_drift(sol, t, q) - composed));
        }
      }
    }
    r.measured = worst;
    r.threshold = 1e-12;
    r.passed = worst <= 1e-12;
    r.metrics["max_abs_difference"] = worst;
    out.push_back(std::move(r));
  }

  {
    auto r = make("I2", "zero parameters give the identity transform");
    const auto base = PositiveSolution::reversed_kernel(theta, 5.0, 0.1);
    std::uniform_real_distribution<double> ut(0.0, 2.0), uq(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double t = ut(rng);
      const double q = uq(rng);
      const double ref = eval(base, t, q);
      for (const auto& sol : {linear_transform(base, LinearForce{0.0}, theta),
                              quadratic_transform(base, OscillatorFreq{0.0}, theta),
                              ou_transform(base, DriftRate{0.0}, theta)}) {
        worst = std::max(worst, std::fabs(eval(sol, t, q) - ref));
      }
    }
    r.measured = worst;
    r.threshold = 0.0;
    r.passed = worst == 0.0;
    out.push_back(std::move(r));
  }

  {
    auto r = make("I3", "AVX2 kernels are bit-identical to the scalar reference");
    bool same = true;
    r.metrics["avx2_available"] = simd::avx2_available();
#if defined(EQM_HAVE_AVX2_KERNELS)
    if (simd::avx2_available()) {
      std::uniform_real_distribution<double> u(0.5, 2.0);
      for (std::size_t n : {3u, 4u, 5u, 8u, 17u, 64u, 203u}) {
        std::vector<double> prev(n), cur(n), next(n), drift(n), pot(n), out_s(n, 0.0), out_v(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          prev[j] = u(rng);
          cur[j] = u(rng);
          next[j] = u(rng);
          drift[j] = u(rng) - 1.0;
          pot[j] = u(rng) - 1.0;
        }
        const simd::StencilRow row{drift, pot, 1.3, 0.7, 50.0, 1e4, 100.0};
        const double a = simd::scalar::residual_row_max(row, prev, cur, next);
        const double b = simd::avx2::residual_row_max(row, prev, cur, next);
        same = same && std::memcmp(&a, &b, sizeof a) == 0;
        const simd::ReverseStepRow step{drift, pot, 0.0004, 0.001, 400.0, 10.0};
        simd::scalar::reverse_step_row(step, cur, out_s);
        simd::avx2::reverse_step_row(step, cur, out_v);
        same = same && std::memcmp(out_s.data(), out_v.data(), n * sizeof(double)) == 0;
      }
      for (std::size_t blocks : {1u, 3u, 4u, 7u, 64u}) {
        std::vector<std::uint32_t> s(4 * blocks), v(4 * blocks);
        const simd::PhiloxBatch batch{opt.seed, 0xfeedfacecafebeefull, 0xfffffffeull};
        simd::scalar::philox4x32_10(batch, s);
        simd::avx2::philox4x32_10(batch, v);
        same = same && s == v;
      }
    }
#endif
    r.measured = same ? 0.0 : 1.0;
    r.threshold = 0.0;
    r.passed = same;
    out.push_back(std::move(r));
  }
  return out;
}

ordered_json to_json(const CheckResult& r) {
  return ordered_json{{"id", r.id},
                      {"name", r.name},
                      {"passed", r.passed},
                      {"measured", r.measured},
                      {"threshold", r.threshold},
                      {"metrics", r.metrics}};
}

std::string serialize(const CheckResult& r) { return to_json(r).dump(); }

}  // namespace eqm::acceptance
