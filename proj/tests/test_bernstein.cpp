#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "eqm/bernstein.hpp"
#include "eqm/error.hpp"
#include "eqm/simd/dispatch.hpp"

using namespace eqm;

namespace {

double sd_of_variance(double sigma2, std::size_t n) { return sigma2 * std::sqrt(2.0 / static_cast<double>(n - 1)); }

}  // namespace

TEST_CASE("Brownian motion moments") {
  const TimeGrid grid{0.0, 1.0, 100};
  const std::size_t n = 20000;
  const auto ens = simulate(DriftField::zero(), 1.0, 0.5, grid, n, 3);
  for (std::size_t k : {25u, 50u, 100u}) {
    const double t = grid.time(k);
    const auto m = moments(ens, k);
    CHECK(m.count == n);
    CHECK(std::fabs(m.mean - 0.5) <= 5.0 * std::sqrt(t / n));
    CHECK(std::fabs(m.variance - t) <= 5.0 * sd_of_variance(t, n));
  }
  const auto m0 = moments(ens, 0);
  CHECK(m0.mean == 0.5);
  CHECK(m0.variance == 0.0);
}

TEST_CASE("theta = 0 integrates the drift ODE") {
  // dz/dt = z, z(0) = 1.
  const DriftField growth{[](double, double z) { return z; }, std::nullopt};
  const TimeGrid grid{0.0, 1.0, 1000};
  const auto ens = simulate(growth, 0.0, 1.0, grid, 3, 1);
  for (std::size_t p = 0; p < 3; ++p) {
    CHECK(std::fabs(*ens.value(p, 1000) - std::exp(1.0)) <= 2.0 * grid.dt() * std::exp(1.0));
  }
  const auto flat = simulate(DriftField::zero(), 0.0, 1.0, grid, 2, 1);
  CHECK(*flat.value(1, 1000) == 1.0);
}

TEST_CASE("Brownian bridge from the reversed heat kernel") {
  const Theta theta(1.0);
  const auto drift = DriftField::of(PositiveSolution::reversed_kernel(theta, 1.0));
  const TimeGrid grid{0.0, 1.0, 1000};
  const std::size_t n = 20000;
  const auto ens = simulate(drift, 1.0, 0.0, grid, n, 11, {{500, 900}, 0});
  CHECK(ens.recorded_steps().size() == 3);
  const auto mid = moments(ens, 500);
  CHECK(std::fabs(mid.mean) <= 5.0 * std::sqrt(0.25 / n));
  CHECK(std::fabs(mid.variance - 0.25) <= 5.0 * sd_of_variance(0.25, n));
  const auto late = moments(ens, 900);
  CHECK(std::fabs(late.variance - 0.09) <= 5.0 * sd_of_variance(0.09, n));
  CHECK_THROWS_AS(ens.value(0, 400), InvalidArgument);
  CHECK_THROWS(moments(ens, 400));
}

TEST_CASE("estimate_drift recovers known drifts") {
  const TimeGrid grid{0.0, 1.0, 200};
  const std::size_t n = 50000;
  SUBCASE("constant") {
    const DriftField c{[](double, double) { return 0.7; }, std::nullopt};
    const auto ens = simulate(c, 1.0, 0.0, grid, n, 4, {{100, 101}, 0});
    const auto bins = estimate_drift(ens, 100, {-1.0, 1.0, 10});
    REQUIRE(bins.size() >= 8);
    for (const auto& b : bins) {
      CHECK(b.count >= kMinBinCount);
      CHECK(std::fabs(b.estimate - 0.7) <= 5.0 / std::sqrt(b.count * grid.dt()));
    }
  }
  SUBCASE("zero") {
    const auto ens = simulate(DriftField::zero(), 1.0, 0.0, grid, n, 4, {{100, 101}, 0});
    for (const auto& b : estimate_drift(ens, 100, {-1.0, 1.0, 10})) {
      CHECK(std::fabs(b.estimate) <= 5.0 / std::sqrt(b.count * grid.dt()));
    }
  }
  SUBCASE("linear restoring drift") {
    const DriftField ou{[](double, double z) { return -2.0 * z; }, std::nullopt};
    const auto ens = simulate(ou, 1.0, 0.0, grid, n, 6, {{150, 151}, 0});
    const auto bins = estimate_drift(ens, 150, {-0.8, 0.8, 8});
    REQUIRE(bins.size() >= 6);
    double sxy = 0.0, sxx = 0.0;
    for (const auto& b : bins) {
      sxy += b.center * b.estimate * b.count;
      sxx += b.center * b.center * b.count;
    }
    CHECK(sxy / sxx == doctest::Approx(-2.0).epsilon(0.1));
  }
  SUBCASE("sparse bins are dropped") {
    const auto ens = simulate(DriftField::zero(), 1.0, 0.0, grid, 50, 4, {{100, 101}, 0});
    CHECK(estimate_drift(ens, 100, {-1.0, 1.0, 4}).empty());
  }
  SUBCASE("missing columns are rejected") {
    const auto ens = simulate(DriftField::zero(), 1.0, 0.0, grid, 10, 4, {{100}, 0});
    CHECK_THROWS(estimate_drift(ens, 100, {-1.0, 1.0, 4}));
  }
}

TEST_CASE("pathwise comparison") {
  const TimeGrid grid{0.0, 1.0, 50};
  const auto a = simulate(DriftField::zero(), 1.0, 0.0, grid, 100, 1);
  const auto b = simulate(DriftField::zero(), 1.0, 0.0, grid, 100, 1);
  const auto c = simulate(DriftField::zero(), 1.0, 0.0, grid, 100, 2);
  CHECK(compare_pathwise(a, b) == 0.0);
  CHECK(compare_pathwise(a, c) > 0.1);
  CHECK_THROWS_AS(compare_pathwise(a, simulate(DriftField::zero(), 1.0, 0.0, grid, 99, 1)), InvalidArgument);
  CHECK_THROWS_AS(compare_pathwise(a, simulate(DriftField::zero(), 1.0, 0.0, {0.0, 1.0, 40}, 100, 1)),
                  InvalidArgument);
}

TEST_CASE("output is independent of worker count and SIMD backend") {
  const auto drift = DriftField::of(PositiveSolution::reversed_kernel(Theta(0.8), 2.0, 0.3));
  const TimeGrid grid{0.0, 1.0, 300};
  const auto ref = simulate(drift, 0.8, 0.1, grid, 257, 99, {{}, 1});
  for (unsigned w : {2u, 3u, 8u}) {
    CHECK(compare_pathwise(ref, simulate(drift, 0.8, 0.1, grid, 257, 99, {{}, w})) == 0.0);
  }
  {
    simd::ScopedBackend scalar(simd::Backend::Scalar);
    CHECK(compare_pathwise(ref, simulate(drift, 0.8, 0.1, grid, 257, 99, {{}, 2})) == 0.0);
  }
  const auto sparse = simulate(drift, 0.8, 0.1, grid, 257, 99, {{300, 150}, 3});
  for (std::size_t p = 0; p < 257; p += 16) {
    CHECK(*sparse.value(p, 150) == *ref.value(p, 150));
    CHECK(*sparse.value(p, 300) == *ref.value(p, 300));
  }
}

TEST_CASE("Brownian scaling holds at every recorded time") {
  // Std of the sample mean must shrink like 1/sqrt(n).
  const TimeGrid grid{0.0, 2.0, 40};
  auto worst = [&](std::size_t n) {
    const auto ens = simulate(DriftField::zero(), 1.0, 0.0, grid, n, 21);
    double w = 0.0;
    for (std::size_t k = 1; k <= grid.steps; ++k) {
      const auto m = moments(ens, k);
      const double t = grid.time(k);
      CHECK(std::fabs(m.variance - t) <= 5.0 * sd_of_variance(t, n));
      w = std::max(w, std::fabs(m.variance / t - 1.0));
    }
    return w;
  };
  const double w1 = worst(2000);
  const double w4 = worst(32000);
  CHECK(w1 / w4 >= 1.5);
  CHECK(w1 / w4 <= 12.0);
}

TEST_CASE("guards and absorption") {
  const TimeGrid grid{0.0, 1.0, 100};
  const DriftField singular{[](double, double z) { return -1.0 / z; }, Guard{0.0, 0.05}};
  CHECK_THROWS_AS(simulate(singular, 1.0, 0.0, grid, 10, 1), InvalidArgument);
  const auto ens = simulate(singular, 1.0, 0.5, grid, 2000, 1);
  std::size_t absorbed = 0;
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    if (const auto k = ens.absorbed_at(p)) {
      ++absorbed;
      CHECK(*k > 0);
      CHECK_FALSE(ens.value(p, *k).has_value());
      CHECK_FALSE(ens.value(p, grid.steps).has_value());
      CHECK(ens.value(p, *k - 1).has_value());
      CHECK(std::isnan(ens.row(p)[*k]));
    }
  }
  CHECK(absorbed > 0);
  CHECK(moments(ens, grid.steps).count == ens.n_paths() - absorbed);

  PathEnsemble all(grid, 2, 0, {});
  all.mark_absorbed(0, 0);
  all.mark_absorbed(1, 0);
  CHECK_THROWS_AS(moments(all, 50), InvalidArgument);
}

TEST_CASE("argument validation") {
  const TimeGrid grid{0.0, 1.0, 10};
  CHECK_THROWS_AS(simulate(DriftField::zero(), -1.0, 0.0, grid, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(simulate(DriftField::zero(), 1.0, 0.0, {0.0, 1.0, 0}, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(simulate(DriftField::zero(), 1.0, 0.0, {1.0, 0.0, 10}, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(simulate(DriftField::zero(), 1.0, 0.0, grid, 4, 1, {{11}, 0}), InvalidArgument);
  CHECK(grid.step_at(0.31) == 3);
}

TEST_CASE("pathwise_map_linear on an ensemble") {
  const TimeGrid grid{0.0, 1.0, 4};
  const auto ens = simulate(DriftField::zero(), 0.0, 0.0, grid, 2, 1);
  const auto mapped = pathwise_map_linear(ens, LinearForce{2.0});
  for (std::size_t k = 0; k <= 4; ++k) {
    const double t = grid.time(k);
    CHECK(*mapped.value(1, k) == doctest::Approx(t * t).epsilon(1e-15));
  }
}
