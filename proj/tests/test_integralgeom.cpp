#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nlphase/energy.hpp"
#include "nlphase/integralgeom.hpp"
#include "nlphase/quadrature.hpp"

using namespace nlphase;

namespace {

Kernel frac2d(double s, double rho = 0.0) {
  KernelSpec sp;
  sp.kind = KernelKind::Fractional;
  sp.dim = 2;
  sp.s = s;
  sp.rho = rho;
  return rho > 0.0 ? truncated(make_kernel({sp.kind, sp.dim, sp.s, 1.0, 0.0, {}}), rho)
                   : make_kernel(sp);
}

}  // namespace

TEST_CASE("slicing identity: unit-square smoke test") {
  Rect A{vec2(0, 0), vec2(1, 1)};
  SliceCheck c = bp_check([](Vec, Vec) { return 1.0; }, A, A, 200000, 12345, 2);
  CHECK(c.lhs == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(c.rhs_mc - c.lhs) <= std::max(3.5 * c.stderr_mc, 0.02));
  CHECK(!c.identity_violation);
  std::string j = c.to_json();
  for (const char* k : {"lhs", "rhs", "stderr", "rel_err", "seed", "verdict"})
    CHECK(j.find(k) != std::string::npos);
}

TEST_CASE("slicing identity: disjoint supports give zero on both sides") {
  Rect A{vec2(0, 0), vec2(0.2, 0.2)};
  Rect B{vec2(0.8, 0.8), vec2(1.0, 1.0)};
  // f supported on |y - x| < 0.3 << d(A,B)
  auto f = [](Vec x, Vec y) { return norm(y - x) < 0.3 ? 1.0 : 0.0; };
  SliceCheck c = bp_check(f, A, B, 50000, 7, 1);
  CHECK(c.lhs == doctest::Approx(0.0));
  CHECK(std::abs(c.rhs_mc) <= 3.0 * std::max(c.stderr_mc, 1e-300));
  CHECK(!c.identity_violation);
}

TEST_CASE("slicing identity: truncated kernel against the energy module") {
  Kernel Jt = frac2d(0.75, 0.2);
  Rect A{vec2(0.0, 0.0), vec2(0.3, 0.3)};
  Rect B{vec2(0.45, 0.0), vec2(0.75, 0.3)};
  auto f = [&](Vec x, Vec y) { return Jt(y - x); };
  SliceCheck c = bp_check(f, A, B, 150000, 99, 2);

  // independent cross-module oracle: with u = +1 on A and -1 on B, the
  // kinetic double sum over A x B at eps = 1 equals the plain double integral
  Grid g = Grid::plane(200, 200, 1.0, 1.0, Boundary::Boxed);
  Field u(g, 0.0);
  Mask Am = mask_box(g, A.lo, A.hi), Bm = mask_box(g, B.lo, B.hi);
  for (long i = 0; i < g.ncells(); ++i)
    u[i] = Am[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
  double oracle = kinetic_direct(u, Am, Bm, Jt, 1.0);
  CHECK(c.lhs == doctest::Approx(oracle).epsilon(0.02));
  CHECK(std::abs(c.rhs_mc - c.lhs) <= std::max(4.0 * c.stderr_mc, 0.02 * c.lhs));
}

TEST_CASE("tube measure: unit segment stadium") {
  std::vector<std::pair<Vec, Vec>> seg{{vec2(0, 0), vec2(1, 0)}};
  for (double delta : {0.05, 0.1}) {
    SteinerCheck s = steiner_check(seg, delta, 1024);
    double exact = 2.0 * delta + kPi * delta * delta;
    CHECK(std::abs(s.tube_measure - exact) <= s.grid_tol);
    CHECK(s.holds);  // 2 pi delta bound with room to spare
    CHECK(s.bound == doctest::Approx(2.0 * kPi * delta));
  }

  // leading coefficient of the tube expansion is 2 for a flat piece
  auto [c1, c2] = steiner_leading_fit(seg, {0.02, 0.04, 0.08}, 1024);
  CHECK(c1 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(c2 == doctest::Approx(kPi).epsilon(0.5));
}

TEST_CASE("tube measure: crossing segments are subadditive") {
  std::vector<std::pair<Vec, Vec>> cross{{vec2(-0.5, 0), vec2(0.5, 0)},
                                         {vec2(0, -0.5), vec2(0, 0.5)}};
  double delta = 0.05;
  SteinerCheck both = steiner_check(cross, delta, 1024);
  SteinerCheck first = steiner_check({cross[0]}, delta, 1024);
  SteinerCheck second = steiner_check({cross[1]}, delta, 1024);
  CHECK(both.tube_measure <=
        first.tube_measure + second.tube_measure + both.grid_tol);
  CHECK(both.holds);
}

TEST_CASE("tube measure: square boundary") {
  auto sq = PolyhedralInterface::square(vec2(0.0, 0.0), 1.0);
  std::vector<std::pair<Vec, Vec>> segs;
  for (const auto& f : sq.facets) segs.emplace_back(f.a, f.b);
  SteinerCheck s = steiner_check(segs, 0.01, 2048);
  CHECK(s.holds);
  // exact tube of a square boundary: outer rounded band + inner band
  double delta = 0.01;
  double exact = 2.0 * 4.0 * delta + kPi * delta * delta;  // perimeter 4
  CHECK(std::abs(s.tube_measure - exact) <= s.grid_tol + 4.0 * delta * delta);
}

TEST_CASE("far-field line integral") {
  // compact support below the separation: F vanishes identically
  KernelSpec ind;
  ind.kind = KernelKind::Indicator;
  ind.dim = 2;
  ind.radius = 1.5;
  Kernel B = make_kernel(ind);
  for (double th : {0.0, 0.7, 2.1})
    CHECK(farfield_line_integral(B, unit_vec(th)) == doctest::Approx(0.0));

  // fractional s = 3/4: F = int_2^inf (u-2) u^{-5/2} du = sqrt2 - (4/3) 2^{-3/2}
  Kernel J = frac2d(0.75);
  double expected = std::sqrt(2.0) - 2.0 * (2.0 / 3.0) * std::pow(2.0, -1.5);
  for (double th : {0.3, 1.2}) {
    double F = farfield_line_integral(J, unit_vec(th));
    CHECK(F == doctest::Approx(expected).epsilon(1e-9));
  }

  // independent oracle: literal nested quadrature of the two half-lines on a
  // truncated domain, against the exact truncated-box antiderivative
  // (4/3)[2^{-1/2} - (1+S)^{-1/2} - (T+1)^{-1/2} + (T+S)^{-1/2}]
  auto lk = line_kernel(J, unit_vec(0.3));
  double S = 400.0, T = 400.0;
  double nested =
      quad::integrate2([&](double s, double t) { return lk(t - s); }, -S, -1.0,
                       1.0, T, {1e-10, 1e-7, 2000000, 64})
          .value;
  double truncated_exact =
      (4.0 / 3.0) * (std::pow(2.0, -0.5) - std::pow(1.0 + S, -0.5) -
                     std::pow(T + 1.0, -0.5) + std::pow(T + S, -0.5));
  CHECK(nested == doctest::Approx(truncated_exact).epsilon(1e-3));
  // the truncated value approaches the reduced form as the box grows
  CHECK(truncated_exact < expected);
  CHECK(expected - truncated_exact < 0.1);

  FarfieldReport rep = farfield_sphere_check(J, 32);
  CHECK(!rep.divergent);
  CHECK(rep.sphere_integral == doctest::Approx(2.0 * kPi * expected).epsilon(1e-9));
  CHECK(rep.holds);  // sphere integral below the log-tail bound
  CHECK(rep.log_tail_bound >= rep.sphere_integral);

  // borderline kernel: expected divergence
  KernelSpec half;
  half.kind = KernelKind::Fractional;
  half.dim = 2;
  half.s = 0.5;
  Kernel J5 = make_kernel_unchecked(half);
  FarfieldReport r5 = farfield_sphere_check(J5, 8);
  CHECK(r5.divergent);
  CHECK(r5.holds);  // both sides diverge together
}
