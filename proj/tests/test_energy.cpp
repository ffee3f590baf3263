#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlphase/energy.hpp"

using namespace nlphase;

namespace {

Kernel frac1d(double s) {
  KernelSpec sp;
  sp.kind = KernelKind::Fractional;
  sp.dim = 1;
  sp.s = s;
  return make_kernel(sp);
}

Kernel indicator(int dim, double radius) {
  KernelSpec sp;
  sp.kind = KernelKind::Indicator;
  sp.dim = dim;
  sp.radius = radius;
  return make_kernel(sp);
}

Field random_field(const Grid& g, std::uint64_t seed) {
  Field u(g, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& v : u.values) v = uni(rng);
  return u;
}

}  // namespace

TEST_CASE("two-cell periodic grid, hand-computed double sum") {
  // cells at 0.25 and 0.75, cell volume 1/2, u = (-1, +1), indicator kernel
  // of support 1, eps = 1. The single offset class k=1 folds the images at
  // +-1/2 for a weight density of 2; each ordered pair contributes
  // w * (u1-u0)^2 = 2*4, so kinetic = (1/4) * (1/2)^2 * (8 + 8) = 1.
  Grid g = Grid::line(2, 1.0, Boundary::Periodic);
  Field u(g, 0.0);
  u[0] = -1.0;
  u[1] = 1.0;
  Kernel B = indicator(1, 1.0);
  double direct = kinetic_direct(u, mask_all(g), mask_all(g), B, 1.0);
  CHECK(direct == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kinetic_fast(u, B, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant fields carry no kinetic energy") {
  Grid g = Grid::line(64, 1.0, Boundary::Periodic);
  Field u(g, 0.7);
  CHECK(kinetic_direct(u, mask_all(g), mask_all(g), frac1d(0.75), 0.1) ==
        doctest::Approx(0.0));
  CHECK(kinetic_fast(u, frac1d(0.75), 0.1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("disjoint regions beyond the kernel range do not interact") {
  Grid g = Grid::line(128, 1.0, Boundary::Boxed);
  Field u = random_field(g, 3);
  Mask A = mask_box(g, vec1(0.0), vec1(0.2));
  Mask B = mask_box(g, vec1(0.8), vec1(1.0));
  // support of J_eps is eps * radius = 0.05 << d(A,B) = 0.6
  CHECK(kinetic_direct(u, A, B, indicator(1, 1.0), 0.05) == doctest::Approx(0.0));
}

TEST_CASE("symmetry and split additivity of the discrete double sum") {
  Grid g = Grid::plane(24, 24, 1.0, 1.0, Boundary::Periodic);
  Field u = random_field(g, 17);
  Kernel J = frac1d(0.75);
  KernelSpec sp;
  sp.kind = KernelKind::Fractional;
  sp.dim = 2;
  sp.s = 0.75;
  Kernel J2 = make_kernel(sp);
  Mask A = mask_box(g, vec2(0.1, 0.1), vec2(0.5, 0.9));
  Mask B = mask_box(g, vec2(0.55, 0.2), vec2(0.95, 0.7));
  double ab = kinetic_direct(u, A, B, J2, 0.1);
  double ba = kinetic_direct(u, B, A, J2, 0.1);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-12));

  // exact split identity on disjoint regions
  Mask AB = mask_or(A, B);
  double whole = kinetic_direct(u, AB, AB, J2, 0.1);
  double parts = kinetic_direct(u, A, A, J2, 0.1) +
                 kinetic_direct(u, B, B, J2, 0.1) + 2.0 * ab;
  CHECK(whole == doctest::Approx(parts).epsilon(1e-11));
}

TEST_CASE("oracle equivalence: spectral vs direct") {
  // 1D, truncated fractional kernel
  Grid g1 = Grid::line(64, 1.0, Boundary::Periodic);
  Field u1 = random_field(g1, 23);
  Kernel Jt = truncated(frac1d(0.75), 0.25);
  double d1 = kinetic_direct(u1, mask_all(g1), mask_all(g1), Jt, 0.1);
  double f1 = kinetic_fast(u1, Jt, 0.1);
  CHECK(f1 == doctest::Approx(d1).epsilon(1e-10));

  // 2D checkerboard, singular kernel with cell-averaged weights
  Grid g2 = Grid::plane(16, 16, 1.0, 1.0, Boundary::Periodic);
  Field u2(g2, 0.0);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) u2[g2.index(i, j)] = ((i + j) % 2) ? 1.0 : -1.0;
  KernelSpec sp;
  sp.kind = KernelKind::Fractional;
  sp.dim = 2;
  sp.s = 0.75;
  Kernel J2 = make_kernel(sp);
  double d2 = kinetic_direct(u2, mask_all(g2), mask_all(g2), J2, 0.1);
  double f2 = kinetic_fast(u2, J2, 0.1);
  CHECK(f2 == doctest::Approx(d2).epsilon(1e-9));
}

TEST_CASE("potential energy") {
  Grid g = Grid::line(100, 1.0, Boundary::Boxed);
  DoubleWell W = make_quartic();
  Field pm(g, 1.0);
  CHECK(potential_energy(pm, mask_all(g), W, 0.1) == doctest::Approx(0.0));

  Field zero(g, 0.0);
  // W(0) = 1, region volume 1, so the value is 1/eps
  CHECK(potential_energy(zero, mask_all(g), W, 0.1) == doctest::Approx(10.0));

  // additivity over disjoint regions
  Field u = random_field(g, 5);
  Mask A = mask_box(g, vec1(0.0), vec1(0.3));
  Mask B = mask_box(g, vec1(0.5), vec1(0.9));
  CHECK(potential_energy(u, mask_or(A, B), W, 0.2) ==
        doctest::Approx(potential_energy(u, A, W, 0.2) +
                        potential_energy(u, B, W, 0.2))
            .epsilon(1e-13));
}

TEST_CASE("total energy breakdown") {
  Grid g = Grid::line(128, 1.0, Boundary::Periodic);
  DoubleWell W = make_quartic();
  Field ones(g, 1.0);
  EnergyBreakdown b = total_energy(ones, mask_all(g), frac1d(0.75), W, 0.05);
  CHECK(b.total == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b.path == "fast");
  CHECK(b.total == b.kinetic + b.potential);

  // sharp interface with a truncated kernel: potential vanishes on +-1
  Field sharp(g, 0.0);
  for (long i = 0; i < g.ncells(); ++i) {
    double x = g.center(i)[0];
    sharp[i] = (x > 0.25 && x < 0.75) ? 1.0 : -1.0;
  }
  EnergyBreakdown bs = truncated_energy(sharp, mask_all(g), frac1d(0.75), 0.25, W, 0.05);
  CHECK(bs.potential == doctest::Approx(0.0));
  CHECK(bs.total == doctest::Approx(bs.kinetic));
  CHECK(bs.rho == doctest::Approx(0.25));

  // json emission includes the documented keys
  std::string j = bs.to_json();
  for (const char* key : {"kinetic", "potential", "total", "path", "tail_bound",
                          "epsilon", "rho"})
    CHECK(j.find(key) != std::string::npos);

  // boxed grids take the direct path
  Grid gb = Grid::line(64, 1.0, Boundary::Boxed);
  EnergyBreakdown bb = total_energy(random_field(gb, 9), mask_all(gb), frac1d(0.75), W, 0.1);
  CHECK(bb.path == "direct");
}

TEST_CASE("truncation monotonicity and vanishing beyond the support") {
  Grid g = Grid::line(128, 1.0, Boundary::Periodic);
  DoubleWell W = make_quartic();
  // rho at the kernel support radius wipes out the kinetic part
  Field u = random_field(g, 31);
  EnergyBreakdown none = truncated_energy(u, mask_all(g), indicator(1, 0.4), 0.5, W, 0.1);
  CHECK(none.kinetic == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS(truncated_energy(u, mask_all(g), indicator(1, 0.4), 1.5, W, 0.1));
  CHECK_THROWS(truncated_energy(u, mask_all(g), indicator(1, 0.4), 0.0, W, 0.1));

  Kernel J = frac1d(0.75);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Field v = random_field(g, seed);
    double full = total_energy(v, mask_all(g), J, W, 0.05).total;
    double prev = 0.0;
    for (double rho : {0.5, 0.25, 0.125, 0.0625}) {
      double val = truncated_energy(v, mask_all(g), J, rho, W, 0.05).total;
      CHECK(val >= prev - 1e-10);
      CHECK(val <= full + 1e-10);
      prev = val;
    }
  }
}

TEST_CASE("interior bound: hand case and randomized trials") {
  Kernel B = indicator(1, 1.0);
  // a = 0 degenerates to zero
  BoundCheck z = interior_bound(B, 0.5, 0.0, 1.0, 1, vec1(0.0), vec1(2.0), vec1(1.0));
  CHECK(z.lhs == doctest::Approx(0.0));
  CHECK(z.holds);

  // indicator kernel, a=b=1, eps=1/2, interior y:
  // lhs = int_{|h|<=1/2} 2 h^2 dh = 1/6, rhs = M_J eps = (2/3)(1/2) = 1/3
  BoundCheck c = interior_bound(B, 0.5, 1.0, 1.0, 1, vec1(0.0), vec1(2.0), vec1(1.0));
  CHECK(c.lhs == doctest::Approx(1.0 / 6.0).epsilon(1e-8));
  CHECK(c.rhs == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(c.holds);

  CHECK_THROWS(interior_bound(B, 0.5, 3.0, 1.0, 1, vec1(0.0), vec1(2.0), vec1(1.0)));

  // randomized fractional-kernel trials in 1D and 2D (more in acceptance)
  Kernel J = frac1d(0.75);
  KernelSpec sp2;
  sp2.kind = KernelKind::Fractional;
  sp2.dim = 2;
  sp2.s = 0.75;
  Kernel J2 = make_kernel(sp2);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    double eps = 0.02 + 0.3 * uni(rng);
    double a = 0.1 + 3.0 * uni(rng);
    double b = a * eps * (1.0 + 3.0 * uni(rng));  // enforce b >= a eps
    double y = 2.0 * uni(rng);
    BoundCheck r = interior_bound(J, eps, a, b, 1, vec1(0.0), vec1(2.0), vec1(y));
    CHECK(r.holds);
    BoundCheck r2 = interior_bound(J2, eps, a, b, 2, vec2(0.0, 0.0),
                                   vec2(1.5, 1.1), vec2(2.0 * uni(rng), uni(rng)));
    CHECK(r2.holds);
  }
}

TEST_CASE("separation bound") {
  Grid g = Grid::line(256, 1.0, Boundary::Boxed);
  Kernel J = frac1d(0.75);
  Mask E = mask_box(g, vec1(0.0), vec1(0.3));
  Mask F = mask_box(g, vec1(0.7), vec1(1.0));
  double delta = 0.35;

  // constant field: lhs = 0 <= rhs
  Field c(g, 0.6);
  BoundCheck b0 = separation_bound(c, E, F, J, 0.1, delta);
  CHECK(b0.lhs == doctest::Approx(0.0));
  CHECK(b0.holds);

  // compact kernel with support inside the gap: both sides vanish
  BoundCheck bc = separation_bound(random_field(g, 41), E, F, indicator(1, 1.0),
                                   0.1, delta);
  CHECK(bc.lhs == doctest::Approx(0.0));
  CHECK(bc.rhs == doctest::Approx(0.0));
  CHECK(bc.holds);

  // the separation precondition is enforced
  CHECK_THROWS(separation_bound(c, E, F, J, 0.1, 0.7));

  // +-1 fields at random separations: zero violations
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    double gap = 0.15 + 0.5 * uni(rng);
    double lo = 0.05 + 0.2 * uni(rng);
    double mid = lo + 0.1 + 0.15 * uni(rng);
    Mask Ee = mask_box(g, vec1(lo - 0.05), vec1(mid - gap / 2.0));
    Mask Ff = mask_box(g, vec1(mid + gap / 2.0), vec1(0.99));
    if (mask_count(Ee) == 0 || mask_count(Ff) == 0) continue;
    Field u(g, 0.0);
    for (long i = 0; i < g.ncells(); ++i)
      u[i] = Ee[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
    double eps = 0.02 + 0.2 * uni(rng);
    double delta_t = gap * 0.8;
    BoundCheck r = separation_bound(u, Ee, Ff, J, eps, delta_t);
    CHECK(r.holds);
  }
}

TEST_CASE("kinetic gradient matches finite differences of the direct energy") {
  for (Boundary bc : {Boundary::Periodic, Boundary::Boxed}) {
    Grid g = Grid::line(24, 1.0, bc);
    Field u = random_field(g, 99);
    Kernel J = frac1d(0.75);
    double eps = 0.15;
    Field grad = kinetic_gradient(u, J, eps);
    Mask all = mask_all(g);
    double h = 1e-6;
    for (long i = 0; i < g.ncells(); i += 5) {
      Field up = u, um = u;
      up[i] += h;
      um[i] -= h;
      double fd = (kinetic_direct(up, all, all, J, eps) -
                   kinetic_direct(um, all, all, J, eps)) /
                  (2.0 * h);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(5e-5));
    }
  }
}
