#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nlphase/common.hpp"
#include "nlphase/quadrature.hpp"

using namespace nlphase;

TEST_CASE("finite interval: polynomial and oscillatory") {
  auto r = quad::integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  auto s = quad::integrate([](double x) { return std::sin(x); }, 0.0, kPi);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("tail integral: power decay converges to the closed form") {
  auto r = quad::integrate_tail([](double x) { return std::pow(x, -1.5); }, 1.0);
  CHECK(r.converged);
  CHECK(!r.divergent);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("tail integral: 1/x flags divergence via non-contracting increments") {
  auto r = quad::integrate_tail([](double x) { return 1.0 / x; }, 1.0);
  CHECK(!r.converged);
  CHECK(r.divergent);
}

TEST_CASE("graded shells toward zero: integrable singularity") {
  auto r = quad::integrate_to_zero([](double x) { return 1.0 / std::sqrt(x); }, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));

  auto d = quad::integrate_to_zero([](double x) { return 1.0 / x; }, 1.0);
  CHECK(!d.converged);
  CHECK(d.divergent);
}

TEST_CASE("2D rectangle") {
  auto r = quad::integrate2([](double x, double y) { return x * y; }, 0.0, 1.0,
                            0.0, 2.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("divergence rule on increment sequences") {
  std::vector<double> contracting{1.0, 0.4, 0.16, 0.064, 0.0256, 0.01, 0.004};
  CHECK(!quad::increments_diverge(contracting));
  std::vector<double> flat{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK(quad::increments_diverge(flat));
}
