#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nlphase/kernels.hpp"
#include "nlphase/quadrature.hpp"

using namespace nlphase;

namespace {

KernelSpec frac1d(double s, double rho = 0.0) {
  KernelSpec sp;
  sp.kind = KernelKind::Fractional;
  sp.dim = 1;
  sp.s = s;
  sp.rho = rho;
  return sp;
}

KernelSpec frac2d(double s) {
  KernelSpec sp;
  sp.kind = KernelKind::Fractional;
  sp.dim = 2;
  sp.s = s;
  return sp;
}

KernelSpec indicator(int dim, double radius, double rho = 0.0) {
  KernelSpec sp;
  sp.kind = KernelKind::Indicator;
  sp.dim = dim;
  sp.radius = radius;
  sp.rho = rho;
  return sp;
}

}  // namespace

TEST_CASE("construction and basic evaluation") {
  Kernel J = make_kernel(frac1d(0.75));
  CHECK(J.singularity_order().value() == doctest::Approx(-2.5));
  CHECK(J.eval1(2.0) == doctest::Approx(std::pow(2.0, -2.5)));
  CHECK(J.eval1(-2.0) == doctest::Approx(J.eval1(2.0)));  // even

  Kernel B = make_kernel(indicator(1, 1.0));
  CHECK(B.eval1(0.5) == doctest::Approx(1.0));
  CHECK(B.eval1(2.0) == doctest::Approx(0.0));

  Kernel T = truncated(make_kernel(frac1d(0.75)), 0.1);
  CHECK(T.eval1(0.05) == doctest::Approx(0.0));
  CHECK(T.eval1(0.2) == doctest::Approx(std::pow(0.2, -2.5)));

  CHECK_THROWS(make_kernel(frac1d(0.5)));
  CHECK_THROWS(make_kernel(frac1d(0.3)));
  CHECK_THROWS(make_kernel(indicator(1, -1.0)));
  CHECK_THROWS(truncated(B, 1.5));
}

TEST_CASE("scaling") {
  Kernel B = make_kernel(indicator(1, 1.0));
  Kernel Bh = scaled(B, 0.5);
  CHECK(Bh.eval1(0.25) == doctest::Approx(2.0));
  CHECK(Bh.eval1(0.75) == doctest::Approx(0.0));

  Kernel J = make_kernel(frac1d(0.75));
  Kernel J1 = scaled(J, 1.0);
  for (double h : {0.1, 0.7, 3.0})
    CHECK(J1.eval1(h) == doctest::Approx(J.eval1(h)));

  // composition is multiplicative
  Kernel Jab = scaled(scaled(J, 0.5), 0.4);
  Kernel Jc = scaled(J, 0.2);
  for (double h : {0.3, 1.1}) CHECK(Jab.eval1(h) == doctest::Approx(Jc.eval1(h)));

  // mass is preserved under scaling (change of variables), checked by
  // quadrature for the integrable indicator kernel
  auto mass = [](const Kernel& k) {
    return 2.0 * quad::integrate([&](double r) { return k.eval1(r); }, 0.0, 5.0).value;
  };
  CHECK(mass(Bh) == doctest::Approx(mass(B)).epsilon(1e-9));
}

TEST_CASE("mixed moment closed forms") {
  // 2 int_0^1 r^{-0.5} + 2 int_1^inf r^{-1.5} = 4 + 4
  Kernel J = make_kernel(frac1d(0.75));
  MomentResult m = mixed_moment(J);
  CHECK(m.finite);
  CHECK(m.value == doctest::Approx(8.0).epsilon(1e-9));

  // independent oracle: generic adaptive quadrature of the same integrand
  double near = quad::integrate_to_zero(
                    [&](double r) { return J.eval1(r) * r * r; }, 1.0)
                    .value;
  double far =
      quad::integrate_tail([&](double r) { return J.eval1(r) * r; }, 1.0).value;
  CHECK(2.0 * (near + far) == doctest::Approx(m.value).epsilon(1e-6));

  // indicator: int_{-1}^{1} |h|^2 dh = 2/3
  MomentResult mb = mixed_moment(make_kernel(indicator(1, 1.0)));
  CHECK(mb.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // truncation only removes mass
  for (double rho : {0.5, 0.25, 0.125, 0.01}) {
    MomentResult mt = mixed_moment(truncated(J, rho));
    CHECK(mt.value <= m.value + 1e-12);
  }

  // pointwise truncation monotonicity: J^rho <= J^rho' <= J for rho >= rho'
  Kernel Ja = truncated(J, 0.5), Jb = truncated(J, 0.125);
  for (double h = 0.01; h < 4.0; h *= 1.7) {
    CHECK(Ja.eval1(h) <= Jb.eval1(h) + 1e-15);
    CHECK(Jb.eval1(h) <= J.eval1(h) + 1e-15);
  }
}

TEST_CASE("tail moment closed forms and monotonicity") {
  Kernel J = make_kernel(frac1d(0.75));
  CHECK(tail_moment(J, 1.0).value == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(tail_moment(J, 0.25).value == doctest::Approx(2.0).epsilon(1e-9));

  Kernel B = make_kernel(indicator(1, 1.0));
  CHECK(tail_moment(B, 0.5).value == doctest::Approx(0.0));

  double prev = 0.0;
  for (double t : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    double cur = tail_moment(J, t).value;
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }

  // tail_moment(t)/t <= mixed moment for t >= 1
  double mj = mixed_moment(J).value;
  for (double t : {1.0, 1.5, 2.0, 4.0, 16.0, 256.0})
    CHECK(tail_moment(J, t).value / t <= mj * (1.0 + 1e-12));
}

TEST_CASE("integrability report: passing and failing kernels") {
  Kernel J = make_kernel(frac1d(0.75));
  IntegrabilityReport rep = check_integrability(J);
  CHECK(rep.log_tail.finite);
  CHECK(rep.log_tail.value == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(rep.series.finite);
  CHECK(rep.criteria_agree);

  Kernel B = make_kernel(indicator(1, 1.0));
  IntegrabilityReport rb = check_integrability(B);
  CHECK(rb.log_tail.finite);
  CHECK(rb.log_tail.value == doctest::Approx(0.0));
  CHECK(rb.series.finite);
  CHECK(rb.criteria_agree);

  // borderline s = 1/2: both criteria diverge; capped partial sums grow
  // roughly logarithmically (non-contracting dyadic increments)
  Kernel J5 = make_kernel_unchecked(frac1d(0.5));
  IntegrabilityReport r5 = check_integrability(J5);
  CHECK(!r5.log_tail.finite);
  CHECK(!r5.series.finite);
  CHECK(r5.criteria_agree);
  CHECK(r5.series.capped);
  const auto& ps = r5.series.partial_sums;
  REQUIRE(ps.size() >= 4096);
  double inc1 = ps[1023] - ps[511];
  double inc2 = ps[2047] - ps[1023];
  double inc3 = ps[4095] - ps[2047];
  CHECK(inc2 > 0.0);
  CHECK(inc3 > 0.5 * inc2);  // log growth: dyadic increments do not contract
  CHECK(inc2 > 0.5 * inc1);
}

TEST_CASE("verdict agreement across the built-in families") {
  std::vector<Kernel> ks;
  for (double s : {0.55, 0.75, 0.95}) ks.push_back(make_kernel(frac1d(s)));
  ks.push_back(make_kernel(indicator(1, 1.0)));
  ks.push_back(truncated(make_kernel(frac1d(0.75)), 0.1));
  ks.push_back(make_kernel(frac2d(0.75)));
  for (const auto& k : ks) {
    IntegrabilityReport rep = check_integrability(k);
    CHECK(rep.criteria_agree);
    CHECK(rep.log_tail.finite);
    CHECK(rep.series.finite);
  }
}

TEST_CASE("directional marginal") {
  // chord of the unit disk
  Kernel B2 = make_kernel(indicator(2, 1.0));
  Kernel1D mb = marginal(B2, vec2(1.0, 0.0));
  CHECK(mb(0.5) == doctest::Approx(2.0 * std::sqrt(0.75)).epsilon(1e-12));
  CHECK(mb(0.0) == doctest::Approx(2.0));
  CHECK(mb(1.5) == doctest::Approx(0.0));

  // dimension 1: marginal is the kernel itself
  Kernel J1 = make_kernel(frac1d(0.75));
  Kernel1D m1 = marginal(J1, vec1(1.0));
  CHECK(m1(0.3) == doctest::Approx(J1.eval1(0.3)));

  // planar power kernel: closed form c(s) |r|^{-1-2s}; cross-check the
  // constant against direct transverse quadrature and fit the exponent
  double s = 0.75;
  Kernel J2 = make_kernel(frac2d(s));
  Kernel1D m2 = marginal(J2, vec2(0.0, 1.0));
  double c_expected = std::sqrt(kPi) * std::tgamma(s + 0.5) / std::tgamma(s + 1.0);
  CHECK(m2(1.0) == doctest::Approx(c_expected).epsilon(1e-9));
  double q = quad::integrate_tail(
                 [&](double z) { return std::pow(1.0 + z * z, -(1.0 + s)); }, 0.0)
                 .value;
  CHECK(2.0 * q == doctest::Approx(c_expected).epsilon(1e-6));
  double slope = std::log(m2(2.0) / m2(0.5)) / std::log(4.0);
  CHECK(slope == doctest::Approx(-(1.0 + 2.0 * s)).epsilon(1e-9));

  // rotational symmetry through the generic quadrature path
  Kernel1D ma = marginal(J2, unit_vec(0.3), MarginalMethod::Quadrature);
  Kernel1D mc = marginal(J2, unit_vec(1.9), MarginalMethod::Quadrature);
  for (double r : {0.25, 0.5, 1.0, 2.0})
    CHECK(ma(r) == doctest::Approx(mc(r)).epsilon(1e-6));
  // and the generic path agrees with the closed form
  for (double r : {0.5, 1.0, 2.0})
    CHECK(ma(r) == doctest::Approx(m2(r)).epsilon(1e-6));
}

TEST_CASE("marginal of a truncated kernel keeps the outer power law") {
  double s = 0.75, rho = 0.25;
  Kernel J2 = truncated(make_kernel(frac2d(s)), rho);
  Kernel1D m = marginal(J2, vec2(1.0, 0.0));
  Kernel1D mfull = marginal(make_kernel(frac2d(s)), vec2(1.0, 0.0));
  CHECK(m(0.5) == doctest::Approx(mfull(0.5)).epsilon(1e-12));  // beyond rho
  CHECK(m(0.1) < mfull(0.1));                                   // hole removed mass
  CHECK(m(0.1) > 0.0);  // but the transverse tails still contribute
}

TEST_CASE("line kernel") {
  Kernel B2 = make_kernel(indicator(2, 1.0));
  Kernel1D lb = line_kernel(B2, unit_vec(0.7));
  CHECK(lb(0.5) == doctest::Approx(0.5));
  CHECK(lb(-0.5) == doctest::Approx(0.5));  // even
  CHECK(lb(1.5) == doctest::Approx(0.0));

  double s = 0.75;
  Kernel J2 = make_kernel(frac2d(s));
  Kernel1D lj = line_kernel(J2, unit_vec(-1.1));
  CHECK(lj(2.0) == doctest::Approx(std::pow(2.0, -1.0 - 2.0 * s)).epsilon(1e-12));
}

TEST_CASE("anisotropic kernels: gauge, moments, marginal constant") {
  KernelSpec sp;
  sp.kind = KernelKind::AnisoFractional;
  sp.dim = 2;
  sp.s = 0.75;
  sp.ball = NormBall::ellipse(1.0, 0.5);
  Kernel K = make_kernel(sp);
  // gauge of the 2:1 ellipse: |(0,y)| has norm 2|y|
  CHECK(K(vec2(0.0, 1.0)) == doctest::Approx(std::pow(2.0, -3.5)).epsilon(1e-4));
  CHECK(K(vec2(1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-4));

  IntegrabilityReport rep = check_integrability(K);
  CHECK(rep.log_tail.finite);
  CHECK(rep.series.finite);

  // marginal constants: C(e1)/C(e2) = 2^{1.5} for the 2:1 ellipse at s=3/4
  Kernel1D me1 = marginal(K, vec2(1.0, 0.0));
  Kernel1D me2 = marginal(K, vec2(0.0, 1.0));
  CHECK(me1(1.0) / me2(1.0) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-3));

  // a clearly non-convex ball is rejected
  std::vector<double> bad(16, 1.0);
  bad[0] = bad[8] = 5.0;
  KernelSpec spb = sp;
  spb.ball = NormBall::from_samples(bad);
  CHECK_THROWS(make_kernel(spb));
}

TEST_CASE("kv serialization round trip") {
  KernelSpec a = frac1d(0.75, 0.125);
  CHECK(KernelSpec::parse_kv(a.to_kv()).to_kv() == a.to_kv());
  KernelSpec b = indicator(2, 0.7);
  CHECK(KernelSpec::parse_kv(b.to_kv()).to_kv() == b.to_kv());
  KernelSpec c;
  c.kind = KernelKind::AnisoFractional;
  c.dim = 2;
  c.s = 0.6;
  c.ball = NormBall::ellipse(1.0, 0.5, 16);
  CHECK(KernelSpec::parse_kv(c.to_kv()).to_kv() == c.to_kv());
  CHECK_THROWS(KernelSpec::parse_kv("kind=unknown dim=1"));
}

TEST_CASE("Kernel1D integral helpers") {
  Kernel1D pl = Kernel1D::power_law(1.0, -2.5);
  CHECK(pl.mass(1.0, 2.0) ==
        doctest::Approx((std::pow(2.0, -1.5) - 1.0) / -1.5).epsilon(1e-12));
  CHECK(pl.tail_mass(1.0) == doctest::Approx(1.0 / 1.5).epsilon(1e-12));
  // int_1^inf (r-1) r^{-2.5} dr = int r^{-1.5} - int r^{-2.5} = 2 - 2/3
  CHECK(pl.excess_tail(1.0) == doctest::Approx(2.0 - 2.0 / 3.0).epsilon(1e-9));

  Kernel1D bx = Kernel1D::box(1.0, 1.0);
  CHECK(bx.mass(0.0, 2.0) == doctest::Approx(1.0));
  CHECK(bx.excess_tail(0.5) == doctest::Approx(0.125));
}
