#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlphase/cell.hpp"

using namespace nlphase;

namespace {

Kernel frac(int dim, double s) {
  KernelSpec sp;
  sp.kind = KernelKind::Fractional;
  sp.dim = dim;
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

CellOptions fast_opts() {
  CellOptions o;
  o.samples = 512;
  o.window_factor = 15.0;
  return o;
}

}  // namespace

TEST_CASE("monotone projection (pool adjacent violators)") {
  std::vector<double> v{1.0, 2.0, 3.0};
  project_monotone(v);
  CHECK(v == std::vector<double>{1.0, 2.0, 3.0});

  std::vector<double> w{3.0, 1.0};
  project_monotone(w);
  CHECK(w[0] == doctest::Approx(2.0));
  CHECK(w[1] == doctest::Approx(2.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(40);
    for (auto& x : a) x = uni(rng);
    std::vector<double> b = a;
    project_monotone(b);
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i] >= b[i - 1] - 1e-14);
    std::vector<double> c = b;
    project_monotone(c);  // idempotent
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(c[i] == doctest::Approx(b[i]));
    // projection never increases the distance to any monotone vector (checked
    // against the zero vector: sum b^2 <= sum a^2 is implied by projection)
    double na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    CHECK(nb <= na + 1e-12);
  }
}

TEST_CASE("sign profile against the box marginal has unit energy") {
  // (1/4) iint 1_{|r|<=1} |sgn(t+r)-sgn(t)|^2 = int_0^1 2r dr * ... = 1
  Profile sign = Profile::sign_profile(20.0, 2048);
  Kernel1D box = Kernel1D::box(1.0, 1.0);
  CellEnergy e = cell_energy_1d(sign, box, make_quartic());
  CHECK(e.potential == doctest::Approx(0.0));
  CHECK(e.tails == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.total == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("admissibility: constant profiles need matching tails") {
  Profile flat;
  flat.half_length = 10.0;
  flat.samples.assign(256, 1.0);
  Kernel1D box = Kernel1D::box(1.0, 1.0);
  CHECK_THROWS(cell_energy_1d(flat, box, make_quartic()));

  flat.lo_tail = 1.0;  // overridden tails make it admissible with zero energy
  CellEnergy e = cell_energy_1d(flat, box, make_quartic());
  CHECK(e.total == doctest::Approx(0.0));
}

TEST_CASE("grid refinement changes a smooth profile's energy by < 1%") {
  Kernel1D box = Kernel1D::box(1.0, 1.0);
  DoubleWell W = make_quartic();
  Profile p1 = Profile::tanh_profile(15.0, 512, 1.0);
  Profile p2 = Profile::tanh_profile(15.0, 1024, 1.0);
  double e1 = cell_energy_1d(p1, box, W).total;
  double e2 = cell_energy_1d(p2, box, W).total;
  CHECK(std::abs(e2 - e1) / e1 < 0.01);
}

TEST_CASE("optimizer: descent from the sign profile under the box marginal") {
  Kernel1D box = Kernel1D::box(1.0, 1.0);
  DoubleWell W = make_quartic();
  Profile init = Profile::sign_profile(15.0, 512);
  SurfaceTension st = optimize_profile(box, W, init, fast_opts());
  CHECK(st.value <= 1.0 + 1e-6);  // admissible upper bound
  CHECK(st.value > 0.1);
  CHECK(st.converged);
  for (std::size_t i = 1; i < st.trace.size(); ++i)
    CHECK(st.trace[i] <= st.trace[i - 1] + 1e-15);

  // local stability: perturb the optimum, re-optimize, recover the value
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uni(-0.02, 0.02);
  Profile pert = st.profile;
  for (auto& v : pert.samples) v = std::clamp(v + uni(rng), -1.0, 1.0);
  project_monotone(pert.samples);
  pert.samples.front() = -1.0;
  pert.samples.back() = 1.0;
  SurfaceTension st2 = optimize_profile(box, W, pert, fast_opts());
  CHECK(std::abs(st2.value - st.value) < 1e-4 * std::max(1.0, st.value));

  // a stiffer well raises the cell energy
  DoubleWell W4 = make_quartic();
  W4.eval = [](double z) {
    double t = 1.0 - z * z;
    return 4.0 * t * t;
  };
  W4.deriv = [](double z) { return -16.0 * z * (1.0 - z * z); };
  SurfaceTension st4 = optimize_profile(box, W4, init, fast_opts());
  CHECK(st4.value > st.value * 1.05);
}

TEST_CASE("optimizer never exceeds the energy of its initialization") {
  Kernel1D box = Kernel1D::box(1.0, 1.0);
  DoubleWell W = make_quartic();
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> uni(0.3, 3.0);
  for (int t = 0; t < 5; ++t) {
    Profile init = Profile::tanh_profile(15.0, 384, uni(rng));
    double e0 = cell_energy_1d(init, box, W).total;
    CellOptions o = fast_opts();
    o.samples = 384;
    SurfaceTension st = optimize_profile(box, W, init, o);
    CHECK(st.value <= e0 + 1e-12);
  }

  // iteration cap: non-convergence is reported with the best-so-far value
  CellOptions capped = fast_opts();
  capped.samples = 384;
  capped.max_iterations = 2;
  SurfaceTension st = optimize_profile(box, W, Profile::sign_profile(15.0, 384), capped);
  CHECK(!st.converged);
  CHECK(st.value <= 1.0 + 1e-6);
  CHECK(st.trace.size() >= 1);
}

TEST_CASE("surface tension: symmetry and isotropy") {
  CellOptions opt = fast_opts();
  Kernel B2 = indicator(2, 1.0);
  SurfaceTension a = surface_tension(vec2(1.0, 0.0), B2, make_quartic(), opt);
  SurfaceTension b = surface_tension(vec2(-1.0, 0.0), B2, make_quartic(), opt);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));

  // isotropy through the honest quadrature path
  CellOptions qopt = opt;
  qopt.marginal_method = MarginalMethod::Quadrature;
  qopt.samples = 384;
  SurfaceTension q1 = surface_tension(unit_vec(0.4), B2, make_quartic(), qopt);
  SurfaceTension q2 = surface_tension(unit_vec(1.7), B2, make_quartic(), qopt);
  CHECK(std::abs(q1.value - q2.value) / q1.value < 0.02);
}

TEST_CASE("anisotropic surface tension varies with direction") {
  KernelSpec sp;
  sp.kind = KernelKind::AnisoFractional;
  sp.dim = 2;
  sp.s = 0.75;
  sp.ball = NormBall::ellipse(1.0, 0.5);
  Kernel K = make_kernel(sp);
  CellOptions opt = fast_opts();
  double p1 = surface_tension(vec2(1.0, 0.0), K, make_quartic(), opt).value;
  double p2 = surface_tension(vec2(0.0, 1.0), K, make_quartic(), opt).value;
  double ratio = std::max(p1, p2) / std::min(p1, p2);
  // scaling heuristic for the 2:1 ball at s=3/4 puts the ratio near 2
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.6);
}

TEST_CASE("truncated surface tension") {
  CellOptions opt = fast_opts();
  DoubleWell W = make_quartic();
  // truncation beyond the compact support kills the kinetic term; the sharp
  // profile then has zero energy
  SurfaceTension zero =
      surface_tension_truncated(vec1(1.0), indicator(1, 0.4), 0.5, W, opt);
  CHECK(zero.value <= 1e-8);

  // monotone in the truncation radius
  Kernel J = frac(1, 0.75);
  double full = surface_tension(vec1(1.0), J, W, opt).value;
  double p_half = surface_tension_truncated(vec1(1.0), J, 0.5, W, opt).value;
  double p_eighth = surface_tension_truncated(vec1(1.0), J, 0.125, W, opt).value;
  CHECK(p_half <= p_eighth + 1e-6);
  CHECK(p_eighth <= full + 1e-6);
}

TEST_CASE("limit energy of polyhedral interfaces") {
  CellOptions opt = fast_opts();
  Kernel B2 = indicator(2, 1.0);
  DoubleWell W = make_quartic();
  CHECK(limit_energy(PolyhedralInterface::empty(2), B2, W, opt) ==
        doctest::Approx(0.0));

  auto sq = PolyhedralInterface::square(vec2(0.5, 0.5), 0.5);
  double psi0 = surface_tension(vec2(1.0, 0.0), B2, W, opt).value;
  CHECK(limit_energy(sq, B2, W, opt) == doctest::Approx(4.0 * 0.5 * psi0).epsilon(1e-6));

  // additivity against per-facet calls with distinct normals
  KernelSpec sp;
  sp.kind = KernelKind::AnisoFractional;
  sp.dim = 2;
  sp.s = 0.75;
  sp.ball = NormBall::ellipse(1.0, 0.5);
  Kernel K = make_kernel(sp);
  PolyhedralInterface two;
  two.dim = 2;
  two.topology = PolyhedralInterface::Topology::Polygon;
  two.polygon = {vec2(0, 0), vec2(1, 0), vec2(0.5, 0.8)};
  two = PolyhedralInterface::polygon2d({vec2(0, 0), vec2(1, 0), vec2(0.5, 0.8)});
  double sum = 0.0;
  for (const auto& f : two.facets)
    sum += surface_tension(f.normal, K, W, opt).value * f.measure;
  CHECK(limit_energy(two, K, W, opt) == doctest::Approx(sum).epsilon(1e-9));

  // the field wrapper returns the infinite sentinel off the sharp class
  Grid g = Grid::plane(32, 32, 1.0, 1.0, Boundary::Boxed);
  Field half(g, 0.5);
  CHECK(std::isinf(limit_energy_of_field(half, sq, B2, W, 1e-9, opt)));
  Field pm = sharp_field(sq, g).field;
  CHECK(limit_energy_of_field(pm, sq, B2, W, 1e-9, opt) ==
        doctest::Approx(limit_energy(sq, B2, W, opt)));
}

TEST_CASE("profile text dump and resampling") {
  Profile p = Profile::tanh_profile(10.0, 64, 1.0);
  std::string txt = p.to_text();
  CHECK(std::count(txt.begin(), txt.end(), '\n') == 64);
  Profile q = p.resampled(10.0, 128);
  CHECK(q.size() == 128);
  for (int i = 8; i < 120; i += 13)
    CHECK(q.samples[static_cast<std::size_t>(i)] ==
          doctest::Approx(std::tanh(q.t(i))).epsilon(0.02));
  CHECK(q.admissible(1e-2));
}
