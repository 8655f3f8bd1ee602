#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "eqm/error.hpp"
#include "eqm/simd/dispatch.hpp"
#include "eqm/solutions.hpp"

using namespace eqm;

namespace {

const Theta kTheta1(1.0);
const TargetEquation kFree{};

std::vector<PositiveSolution> catalog(Theta theta) {
  return {PositiveSolution::constant(theta), PositiveSolution::exponential(theta, 1.0),
          PositiveSolution::exponential(theta, -0.6), PositiveSolution::reversed_kernel(theta, 2.0, 0.2),
          PositiveSolution::mixture({0.3, 2.0}, {PositiveSolution::exponential(theta, 0.8),
                                                 PositiveSolution::reversed_kernel(theta, 3.0, -0.5)})};
}

double residual_of(const PositiveSolution& s, const GridSpec& g, const TargetEquation& eq = kFree) {
  return pde_residual(sample_field(g, [&](double t, double q) { return eval(s, t, q); }), eq, s.theta());
}

}  // namespace

TEST_CASE("eval closed forms") {
  CHECK(eval(PositiveSolution::constant(kTheta1), 0.3, -7.0) == 1.0);
  CHECK(eval(PositiveSolution::exponential(kTheta1, 2.0), 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval(PositiveSolution::reversed_kernel(kTheta1, 1.0, 0.0), 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  const Theta theta(0.7);
  const double t = 0.4, q = -0.3;
  CHECK(eval(PositiveSolution::exponential(theta, 1.3), t, q) ==
        doctest::Approx(std::exp(1.3 * q - 0.49 * 1.69 * t / 2.0)).epsilon(1e-14));
  const double tau = 2.0 - t;
  CHECK(eval(PositiveSolution::reversed_kernel(theta, 2.0, 0.5), t, q) ==
        doctest::Approx(std::exp(-(q - 0.5) * (q - 0.5) / (2.0 * 0.49 * tau)) / std::sqrt(tau)).epsilon(1e-14));

  const auto a = PositiveSolution::exponential(theta, 1.0);
  const auto b = PositiveSolution::reversed_kernel(theta, 3.0);
  const auto mix = PositiveSolution::mixture({0.25, 4.0}, {a, b});
  CHECK(eval(mix, t, q) == doctest::Approx(0.25 * eval(a, t, q) + 4.0 * eval(b, t, q)).epsilon(1e-14));
}

TEST_CASE("drift_of closed forms") {
  CHECK(drift_of(PositiveSolution::constant(kTheta1), 0.2, 5.0) == 0.0);
  CHECK(drift_of(PositiveSolution::exponential(kTheta1, 2.0), 0.9, -1.0) == 2.0);
  CHECK(drift_of(PositiveSolution::reversed_kernel(kTheta1, 1.0), 0.5, 0.3) == doctest::Approx(-0.6).epsilon(1e-15));
}

TEST_CASE("mixture drift matches a finite-difference log-derivative") {
  const Theta theta(1.2);
  const auto mix = PositiveSolution::mixture(
      {1.0, 0.5}, {PositiveSolution::exponential(theta, -1.0), PositiveSolution::reversed_kernel(theta, 4.0, 1.0)});
  for (double q : {-1.5, 0.0, 0.7, 2.0}) {
    const double h = 1e-5;
    const double fd = (mix.log_value(0.3, q + h) - mix.log_value(0.3, q - h)) / (2.0 * h);
    CHECK(drift_of(mix, 0.3, q) == doctest::Approx(theta.squared() * fd).epsilon(1e-8));
  }
}

TEST_CASE("domain and construction errors") {
  const auto k = PositiveSolution::reversed_kernel(kTheta1, 1.0);
  CHECK_THROWS_AS(eval(k, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(drift_of(k, 1.5, 0.0), DomainError);
  CHECK_NOTHROW(eval(k, 1.0 - 2e-6, 0.0));
  CHECK_THROWS_AS(eval(k, 1.0 - 0.5e-6, 0.0), DomainError);
  CHECK_THROWS_AS(Theta(0.0), InvalidArgument);
  CHECK_THROWS_AS(Theta(-1.0), InvalidArgument);
  CHECK_THROWS_AS(PositiveSolution::mixture({0.0}, {PositiveSolution::constant(kTheta1)}), InvalidArgument);
  CHECK_THROWS_AS(PositiveSolution::mixture({-1.0}, {PositiveSolution::constant(kTheta1)}), InvalidArgument);
  CHECK_THROWS_AS(PositiveSolution::mixture({1.0, 1.0}, {PositiveSolution::constant(kTheta1),
                                                         PositiveSolution::constant(Theta(2.0))}),
                  InvalidArgument);
  CHECK_THROWS_AS(PositiveSolution::reversed_kernel(kTheta1, 1.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("positivity over the domain") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(-1.0, 1.9), uq(-4.0, 4.0);
  for (const auto& s : catalog(Theta(0.9))) {
    for (int i = 0; i < 500; ++i) {
      const double t = ut(rng);
      const double q = uq(rng);
      REQUIRE(s.in_domain(t, q));
      CHECK(eval(s, t, q) > 0.0);
    }
  }
}

TEST_CASE("drift scales with theta squared on a fixed spatial profile") {
  const double t = 0.25;
  for (double ratio : {0.5, 2.0, 3.0}) {
    const Theta th(0.8);
    const Theta th2(0.8 * ratio);
    const double factor = th2.squared() / th.squared();
    for (double q : {-1.0, 0.3, 2.0}) {
      CHECK(drift_of(PositiveSolution::exponential(th2, 1.7), t, q) ==
            doctest::Approx(factor * drift_of(PositiveSolution::exponential(th, 1.7), t, q)).epsilon(1e-14));
      // Same Gaussian profile at time t: theta'^2 (T' - t) = theta^2 (T - t).
      const double horizon = 2.0;
      const double horizon2 = t + th.squared() * (horizon - t) / th2.squared();
      CHECK(drift_of(PositiveSolution::reversed_kernel(th2, horizon2, 0.1), t, q) ==
            doctest::Approx(factor * drift_of(PositiveSolution::reversed_kernel(th, horizon, 0.1), t, q))
                .epsilon(1e-13));
    }
  }
}

TEST_CASE("pde_residual") {
  const GridSpec g{0.0, 1.0, 100, -1.0, 1.0, 200};

  SUBCASE("constant solution of the free equation") {
    CHECK(residual_of(PositiveSolution::constant(kTheta1), g) == 0.0);
  }
  SUBCASE("exponential converges at second order") {
    const auto s = PositiveSolution::exponential(kTheta1, 1.0);
    const double r1 = residual_of(s, g);
    const double r2 = residual_of(s, g.refined());
    CHECK(r1 <= 1e-3);
    CHECK(r1 / r2 >= 2.5);
    CHECK(r1 / r2 <= 6.0);
  }
  SUBCASE("detects a non-solution") {
    const TargetEquation linear{PotentialSpec{0.0, 0.0, 1.0, 0.0}, {}};
    const double r = residual_of(PositiveSolution::constant(kTheta1), g, linear);
    // Boundaries are excluded, so max |V eta| over interior nodes is 1 - dq.
    CHECK(r == doctest::Approx(1.0 - g.dq()).epsilon(1e-14));
    CHECK(r < 1.0);
  }
  SUBCASE("every catalog solution converges at second order") {
    const GridSpec wide{0.0, 1.0, 40, -2.0, 2.0, 80};
    for (const auto& s : catalog(Theta(0.9))) {
      const double r1 = residual_of(s, wide);
      const double r2 = residual_of(s, wide.refined());
      if (r1 == 0.0) continue;  // constant
      CHECK(r1 / r2 >= 2.5);
      CHECK(r1 / r2 <= 6.0);
    }
  }
  SUBCASE("mixture residual is bounded by the weighted component residuals") {
    const Theta th(0.9);
    const auto a = PositiveSolution::exponential(th, 1.5);
    const auto b = PositiveSolution::reversed_kernel(th, 1.5, 0.4);
    const std::vector<double> w{0.7, 2.5};
    const auto mix = PositiveSolution::mixture(w, {a, b});
    const double bound = w[0] * residual_of(a, g) + w[1] * residual_of(b, g);
    CHECK(residual_of(mix, g) <= bound * (1.0 + 1e-9));
  }
  SUBCASE("gradient-drift term") {
    // eta = exp(q - c t) with theta = 1: -c = -1/2 + (a q + b) + V(q), so V(q) = -a q - b - c + 1/2.
    const double a = 0.4, b = -0.3, c = 0.25;
    const TargetEquation eq{PotentialSpec{0.0, 0.0, -a, -b - c + 0.5}, VectorDrift{a, b}};
    const auto field = sample_field(g, [&](double t, double q) { return std::exp(q - c * t); });
    const double r1 = pde_residual(field, eq, kTheta1);
    const auto fine = sample_field(g.refined(), [&](double t, double q) { return std::exp(q - c * t); });
    const double r2 = pde_residual(fine, eq, kTheta1);
    CHECK(r1 < 1e-4);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.25));
  }
  SUBCASE("identical across SIMD backends") {
    const auto s = PositiveSolution::reversed_kernel(kTheta1, 2.0, 0.3);
    double results[2];
    int i = 0;
    for (auto backend : {simd::Backend::Scalar, simd::Backend::Avx2}) {
      simd::ScopedBackend guard(backend);
      results[i++] = residual_of(s, g, TargetEquation{PotentialSpec{0.0, 0.3, 0.1, 0.0}, VectorDrift{0.2, 0.1}});
    }
    CHECK(results[0] == results[1]);
  }
  SUBCASE("input validation") {
    auto field = sample_field(g, [](double, double) { return 1.0; });
    field.values[5] = 0.0;
    CHECK_THROWS_AS(pde_residual(field, kFree, kTheta1), InvalidArgument);
    field.values[5] = -2.0;
    CHECK_THROWS_AS(pde_residual(field, kFree, kTheta1), InvalidArgument);
    field.values.pop_back();
    CHECK_THROWS_AS(pde_residual(field, kFree, kTheta1), InvalidArgument);
    CHECK_THROWS_AS(sample_field(GridSpec{0.0, 1.0, 1, -1.0, 1.0, 10}, [](double, double) { return 1.0; }),
                    InvalidArgument);
    CHECK_THROWS_AS(sample_field(GridSpec{0.0, 1.0, 10, -1.0, 1.0, 2}, [](double, double) { return 1.0; }),
                    InvalidArgument);
    CHECK_THROWS_AS(sample_field(GridSpec{1.0, 0.0, 10, -1.0, 1.0, 10}, [](double, double) { return 1.0; }),
                    InvalidArgument);
    const TargetEquation singular{PotentialSpec{1.0, 0.0, 0.0, 0.0}, {}};
    CHECK_THROWS_AS(pde_residual(sample_field(g, [](double, double) { return 1.0; }), singular, kTheta1),
                    InvalidArgument);
  }
}

TEST_CASE("propagate_reverse") {
  SUBCASE("constant data is preserved") {
    const GridSpec g{0.0, 1.0, 400, -1.0, 1.0, 20};
    const std::vector<double> ones(g.nq + 1, 1.0);
    const auto field = propagate_reverse(ones, kFree, kTheta1, g);
    for (double v : field.values) CHECK(v == 1.0);
  }

  auto max_error = [](const PositiveSolution& s, const GridSpec& g, bool reference_boundary) {
    std::vector<double> final_values(g.nq + 1);
    for (std::size_t j = 0; j <= g.nq; ++j) final_values[j] = eval(s, g.t1, g.q(j));
    std::function<double(double, double)> boundary;
    if (reference_boundary) boundary = [&s](double t, double q) { return eval(s, t, q); };
    const auto field = propagate_reverse(final_values, kFree, s.theta(), g, boundary);
    double worst = 0.0;
    for (std::size_t i = 0; i <= g.nt; ++i) {
      for (std::size_t j = 0; j <= g.nq; ++j) worst = std::max(worst, std::fabs(field.at(i, j) - eval(s, g.t(i), g.q(j))));
    }
    return worst;
  };

  SUBCASE("exponential data matches the closed form") {
    const GridSpec g{0.0, 1.0, 800, -1.0, 1.0, 40};
    const double bound = 5.0 * (g.dt() + g.dq() * g.dq());
    CHECK(max_error(PositiveSolution::exponential(kTheta1, 1.0), g, true) <= bound);
    // Log-linear extrapolation is exact on exponential profiles.
    CHECK(max_error(PositiveSolution::exponential(kTheta1, 1.0), g, false) <= bound);
  }
  SUBCASE("reversed kernel data matches the closed form") {
    const GridSpec g{0.0, 1.0, 1000, -2.0, 2.0, 80};
    const double bound = 5.0 * (g.dt() + g.dq() * g.dq());
    CHECK(max_error(PositiveSolution::reversed_kernel(kTheta1, 2.0), g, true) <= bound);
  }
  SUBCASE("potential and drift terms") {
    // eta = exp(q - c t) with V = -a q - b - c + 1/2 (see the residual test).
    const double a = 0.4, b = -0.3, c = 0.25;
    const TargetEquation eq{PotentialSpec{0.0, 0.0, -a, -b - c + 0.5}, VectorDrift{a, b}};
    const GridSpec g{0.0, 1.0, 800, -1.0, 1.0, 40};
    auto exact = [&](double t, double q) { return std::exp(q - c * t); };
    std::vector<double> fin(g.nq + 1);
    for (std::size_t j = 0; j <= g.nq; ++j) fin[j] = exact(g.t1, g.q(j));
    const auto field = propagate_reverse(fin, eq, kTheta1, g, exact);
    double worst = 0.0;
    for (std::size_t j = 0; j <= g.nq; ++j) worst = std::max(worst, std::fabs(field.at(0, j) - exact(0.0, g.q(j))));
    CHECK(worst <= 5.0 * (g.dt() + g.dq() * g.dq()));
  }
  SUBCASE("identical across SIMD backends") {
    const GridSpec g{0.0, 1.0, 1000, -1.0, 1.0, 37};
    std::vector<double> fin(g.nq + 1);
    for (std::size_t j = 0; j <= g.nq; ++j) fin[j] = 1.0 + 0.5 * std::cos(3.0 * g.q(j));
    const TargetEquation eq{PotentialSpec{0.0, 0.2, 0.1, 0.0}, VectorDrift{0.3, -0.1}};
    simd::ScopedBackend scalar(simd::Backend::Scalar);
    const auto a = propagate_reverse(fin, eq, kTheta1, g);
    simd::set_backend(simd::Backend::Avx2);
    const auto b = propagate_reverse(fin, eq, kTheta1, g);
    CHECK(a.values == b.values);
  }
  SUBCASE("errors") {
    const GridSpec unstable{0.0, 1.0, 10, -1.0, 1.0, 40};
    const std::vector<double> ones(41, 1.0);
    CHECK_THROWS_AS(propagate_reverse(ones, kFree, kTheta1, unstable), InvalidArgument);
    const GridSpec g{0.0, 1.0, 1000, -1.0, 1.0, 40};
    std::vector<double> bad(41, 1.0);
    bad[3] = 0.0;
    CHECK_THROWS_AS(propagate_reverse(bad, kFree, kTheta1, g), InvalidArgument);
    CHECK_THROWS_AS(propagate_reverse(std::vector<double>(40, 1.0), kFree, kTheta1, g), InvalidArgument);
  }
}
