#include "nlphase/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nlphase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

// Exact integral of C * r^p over [a, b] with 0 <= a <= b <= inf.
// Returns +inf when the integral diverges.
double power_integral(double C, double p, double a, double b) {
  if (C == 0.0 || a >= b) return 0.0;
  if (p == -1.0) {
    if (a <= 0.0 || std::isinf(b)) return kInf;
    return C * (std::log(b) - std::log(a));
  }
  double q = p + 1.0;
  double hi, lo;
  if (std::isinf(b)) {
    if (q >= 0.0) return kInf;
    hi = 0.0;
  } else {
    hi = std::pow(b, q);
  }
  if (a == 0.0) {
    if (q <= 0.0) return kInf;
    lo = 0.0;
  } else {
    lo = std::pow(a, q);
  }
  return C * (hi - lo) / q;
}

// Exact integral of C * r^p * ln(r) over [a, b], 1 <= a <= b <= inf.
double log_power_integral(double C, double p, double a, double b) {
  if (C == 0.0 || a >= b) return 0.0;
  if (p >= -1.0 && std::isinf(b)) return kInf;
  double q = p + 1.0;
  auto anti = [&](double r) {  // antiderivative
    return std::pow(r, q) * (std::log(r) / q - 1.0 / (q * q));
  };
  double hi = std::isinf(b) ? 0.0 : anti(b);
  return C * (hi - anti(a));
}

double c_marginal(double s) {
  // transverse constant of the planar power kernel:
  // int (1+t^2)^{-(1+s)} dt = sqrt(pi) Gamma(s+1/2) / Gamma(s+1)
  return std::sqrt(kPi) * std::tgamma(s + 0.5) / std::tgamma(s + 1.0);
}

}  // namespace

// ---- NormBall --------------------------------------------------------------

NormBall NormBall::disk(double R, int samples) {
  NormBall b;
  b.radius_.assign(static_cast<std::size_t>(samples), R);
  return b;
}

NormBall NormBall::ellipse(double a, double b, int samples) {
  NormBall nb;
  nb.radius_.resize(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    double th = 2.0 * kPi * i / samples;
    double c = std::cos(th), s = std::sin(th);
    nb.radius_[static_cast<std::size_t>(i)] =
        1.0 / std::sqrt(c * c / (a * a) + s * s / (b * b));
  }
  return nb;
}

NormBall NormBall::from_samples(std::vector<double> radii) {
  NormBall nb;
  nb.radius_ = std::move(radii);
  return nb;
}

double NormBall::boundary_radius(double theta) const {
  const std::size_t m = radius_.size();
  double u = theta / (2.0 * kPi) * static_cast<double>(m);
  u -= std::floor(u / static_cast<double>(m)) * static_cast<double>(m);
  std::size_t i0 = static_cast<std::size_t>(u) % m;
  std::size_t i1 = (i0 + 1) % m;
  double frac = u - std::floor(u);
  return radius_[i0] * (1.0 - frac) + radius_[i1] * frac;
}

double NormBall::gauge(const Vec& h) const {
  double r = norm(h);
  if (r == 0.0) return 0.0;
  return r / boundary_radius(std::atan2(h[1], h[0]));
}

void NormBall::validate() const {
  if (radius_.size() < 8 || radius_.size() % 2 != 0)
    throw std::invalid_argument("norm ball: need an even sample count >= 8");
  double rmin = kInf, rmax = 0.0;
  for (double r : radius_) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("norm ball: boundary radius must be positive and finite");
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  const std::size_t m = radius_.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    if (std::abs(radius_[i] - radius_[i + m / 2]) > 1e-9 * rmax)
      throw std::invalid_argument("norm ball: not even (radius(theta) != radius(theta+pi))");
  }
  // sampled triangle inequality: gauge(u+v) <= gauge(u) + gauge(v) for
  // boundary points u, v
  const int grid = 48;
  for (int i = 0; i < grid; ++i) {
    double ti = 2.0 * kPi * i / grid;
    Vec u = boundary_radius(ti) * unit_vec(ti);
    for (int j = i; j < grid; ++j) {
      double tj = 2.0 * kPi * j / grid;
      Vec v = boundary_radius(tj) * unit_vec(tj);
      if (gauge(u + v) > 2.0 + 1e-6)
        throw std::invalid_argument("norm ball: sampled triangle inequality fails (not convex)");
    }
  }
}

// ---- KernelSpec ------------------------------------------------------------

namespace {
const char* kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::Fractional: return "fractional";
    case KernelKind::AnisoFractional: return "aniso-fractional";
    case KernelKind::Indicator: return "indicator";
  }
  return "?";
}
}  // namespace

std::string KernelSpec::to_kv() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind=" << kind_name(kind) << " dim=" << dim;
  if (kind != KernelKind::Indicator) os << " s=" << s;
  if (kind == KernelKind::Indicator) os << " radius=" << radius;
  if (rho > 0.0) os << " rho=" << rho;
  if (kind == KernelKind::AnisoFractional) {
    os << " ball=";
    const auto& r = ball.samples();
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
  }
  return os.str();
}

KernelSpec KernelSpec::parse_kv(const std::string& line) {
  KernelSpec spec;
  spec.s = 0.0;
  std::istringstream is(line);
  std::string tok;
  bool have_kind = false;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("kernel kv: token without '=': " + tok);
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "kind") {
      have_kind = true;
      if (val == "fractional") spec.kind = KernelKind::Fractional;
      else if (val == "aniso-fractional") spec.kind = KernelKind::AnisoFractional;
      else if (val == "indicator") spec.kind = KernelKind::Indicator;
      else throw std::invalid_argument("kernel kv: unknown kind '" + val + "'");
    } else if (key == "dim") {
      spec.dim = std::stoi(val);
    } else if (key == "s") {
      spec.s = std::stod(val);
    } else if (key == "radius") {
      spec.radius = std::stod(val);
    } else if (key == "rho") {
      spec.rho = std::stod(val);
    } else if (key == "ball") {
      std::vector<double> radii;
      std::istringstream bs(val);
      std::string item;
      while (std::getline(bs, item, ',')) radii.push_back(std::stod(item));
      spec.ball = NormBall::from_samples(std::move(radii));
    } else {
      throw std::invalid_argument("kernel kv: unknown key '" + key + "'");
    }
  }
  if (!have_kind) throw std::invalid_argument("kernel kv: missing kind");
  return spec;
}

// ---- Kernel ----------------------------------------------------------------

Kernel::Kernel(KernelSpec spec) : spec_(std::move(spec)) {}

Kernel make_kernel_unchecked(const KernelSpec& spec) {
  KernelSpec sp = spec;
  if (sp.dim != 1 && sp.dim != 2)
    throw std::invalid_argument("kernel: dim must be 1 or 2");
  if (sp.kind == KernelKind::Indicator && !(sp.radius > 0.0))
    throw std::invalid_argument("kernel: support radius must be positive");
  if (sp.kind == KernelKind::AnisoFractional) {
    if (sp.dim != 2)
      throw std::invalid_argument("kernel: aniso-fractional requires dim=2");
    sp.ball.validate();
  }
  if (sp.rho < 0.0) throw std::invalid_argument("kernel: rho must be nonnegative");
  if (sp.kind != KernelKind::Indicator && !(sp.s > 0.0 && sp.s < 1.0))
    throw std::invalid_argument("kernel: fractional order must lie in (0, 1)");
  return Kernel(sp);
}

Kernel make_kernel(const KernelSpec& spec) {
  if (spec.kind != KernelKind::Indicator && !(spec.s > 0.5))
    throw std::invalid_argument(
        "kernel: fractional order s must exceed 1/2 (the tail-moment series "
        "sum_n tail_moment(1/n)/n diverges otherwise); got s=" +
        std::to_string(spec.s));
  return make_kernel_unchecked(spec);
}

double Kernel::operator()(const Vec& h) const {
  double r = norm(h);
  if (r == 0.0) return kInf;
  double rb = r / scale_;  // base coordinates
  if (rb <= spec_.rho) return 0.0;
  double base;
  switch (spec_.kind) {
    case KernelKind::Fractional:
      base = std::pow(rb, -(spec_.dim + 2.0 * spec_.s));
      break;
    case KernelKind::AnisoFractional: {
      double g = spec_.ball.gauge({h[0] / scale_, h[1] / scale_});
      base = std::pow(g, -(spec_.dim + 2.0 * spec_.s));
      break;
    }
    case KernelKind::Indicator:
      base = rb <= spec_.radius ? 1.0 : 0.0;
      break;
    default:
      base = 0.0;
  }
  return base * std::pow(scale_, -spec_.dim);
}

double Kernel::radial_value(double r) const {
  if (!radial()) throw std::logic_error("radial_value on a non-radial kernel");
  Vec h = vec1(r);
  if (spec_.dim == 2) h = vec2(r, 0.0);
  return (*this)(h);
}

double Kernel::support_radius() const {
  if (spec_.kind == KernelKind::Indicator) return spec_.radius * scale_;
  return kInf;
}

double Kernel::inner_radius() const { return spec_.rho * scale_; }

std::optional<double> Kernel::singularity_order() const {
  if (spec_.rho > 0.0) return std::nullopt;  // bounded at the origin
  if (spec_.kind == KernelKind::Indicator) return std::nullopt;
  return -(spec_.dim + 2.0 * spec_.s);
}

std::optional<double> Kernel::decay_order() const {
  if (spec_.kind == KernelKind::Indicator) return std::nullopt;  // compact
  return -(spec_.dim + 2.0 * spec_.s);
}

std::string Kernel::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << spec_.to_kv() << " scale=" << scale_;
  return os.str();
}

Kernel scaled(const Kernel& k, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("scaled: eps must be positive");
  Kernel out = k;
  out.scale_ *= eps;
  return out;
}

Kernel truncated(const Kernel& k, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("truncated: rho must lie in (0, 1)");
  Kernel out = k;
  out.spec_.rho = std::max(out.spec_.rho, rho);
  return out;
}

// ---- moments ---------------------------------------------------------------

namespace {

// Power-law prefactor and exponent of the radial profile (radial or
// angular-separated kinds), in evaluated coordinates:
//   kernel(|h|=r) = coef * r^p   on  inner < r <= outer.
struct RadialPower {
  double coef;   // includes the scale factor
  double p;
  double inner;  // evaluated truncation radius
  double outer;  // evaluated support radius (inf if none)
  double angular;  // measure factor replacing the sphere measure
};

RadialPower radial_power(const Kernel& k) {
  const KernelSpec& sp = k.spec();
  RadialPower rp{};
  rp.inner = k.inner_radius();
  rp.outer = k.support_radius();
  double sc = k.scale_factor();
  switch (sp.kind) {
    case KernelKind::Fractional:
      rp.coef = std::pow(sc, 2.0 * sp.s);
      rp.p = -(sp.dim + 2.0 * sp.s);
      rp.angular = sphere_measure(sp.dim);
      break;
    case KernelKind::AnisoFractional: {
      rp.coef = std::pow(sc, 2.0 * sp.s);
      rp.p = -(sp.dim + 2.0 * sp.s);
      // angular factor: mean of boundary_radius^{dim+2s} over directions
      const auto& radii = sp.ball.samples();
      Accumulator acc;
      for (double r : radii) acc.add(std::pow(r, sp.dim + 2.0 * sp.s));
      rp.angular = acc.value() / static_cast<double>(radii.size()) * 2.0 * kPi;
      break;
    }
    case KernelKind::Indicator:
      rp.coef = std::pow(sc, -sp.dim);
      rp.p = 0.0;
      rp.angular = sphere_measure(sp.dim);
      break;
  }
  return rp;
}

}  // namespace

MomentResult mixed_moment(const Kernel& k, const quad::Options&) {
  RadialPower rp = radial_power(k);
  int d = k.dim();
  // near field: r^2 weight up to r=1; far field: r weight beyond
  double near_hi = std::min(1.0, rp.outer);
  double near = power_integral(rp.coef, rp.p + d + 1, rp.inner, near_hi);
  double far = 0.0;
  if (rp.outer > 1.0)
    far = power_integral(rp.coef, rp.p + d, std::max(1.0, rp.inner),
                         rp.outer);
  MomentResult res;
  res.analytic = true;
  res.value = rp.angular * (near + far);
  res.finite = std::isfinite(res.value);
  return res;
}

MomentResult tail_moment(const Kernel& k, double t, const quad::Options&) {
  if (!(t > 0.0)) throw std::invalid_argument("tail_moment: t must be positive");
  RadialPower rp = radial_power(k);
  int d = k.dim();
  double lo = std::max(1.0 / t, rp.inner);
  MomentResult res;
  res.analytic = true;
  res.value = rp.angular * power_integral(rp.coef, rp.p + d, lo, rp.outer);
  res.finite = std::isfinite(res.value);
  return res;
}

MomentResult log_tail_moment(const Kernel& k, double lower, const quad::Options&) {
  if (lower < 1.0) throw std::invalid_argument("log_tail_moment: lower must be >= 1");
  RadialPower rp = radial_power(k);
  int d = k.dim();
  double lo = std::max(lower, rp.inner);
  MomentResult res;
  res.analytic = true;
  res.value = rp.angular * log_power_integral(rp.coef, rp.p + d, lo, rp.outer);
  res.finite = std::isfinite(res.value);
  return res;
}

SeriesCheck tail_series(const Kernel& k, int n_terms, const quad::Options&) {
  RadialPower rp = radial_power(k);
  int d = k.dim();
  SeriesCheck out;
  // term_n = tail_moment(1/n) / n; divergent tail moments are capped so the
  // partial-sum growth is still reportable.
  bool tails_finite = std::isfinite(
      power_integral(rp.coef, rp.p + d, std::max(1.0, rp.inner), rp.outer));
  double horizon = 1e6;
  out.capped = !tails_finite;
  out.cap_horizon = out.capped ? horizon : 0.0;
  Accumulator sum;
  out.partial_sums.reserve(static_cast<std::size_t>(n_terms));
  for (int n = 1; n <= n_terms; ++n) {
    double lo = std::max(static_cast<double>(n), rp.inner);
    double hi = out.capped ? std::min(horizon, rp.outer) : rp.outer;
    double omega = rp.angular * power_integral(rp.coef, rp.p + d, lo, hi);
    sum.add(omega / n);
    out.partial_sums.push_back(sum.value());
  }
  // analytic verdict: terms decay like n^{p+d}; the series converges iff
  // p + d < -1 (compact kernels converge trivially).
  if (!tails_finite) {
    out.finite = false;
  } else if (std::isfinite(rp.outer)) {
    out.finite = true;
    out.value = out.partial_sums.back();  // terms vanish beyond the support
  } else {
    out.finite = rp.p + d < -1.0;
    if (out.finite) {
      // integral-comparison remainder for the decreasing analytic terms
      double c = rp.angular * rp.coef / (-(rp.p + d) - 1.0);
      double m = static_cast<double>(n_terms);
      double remainder = c * std::pow(m, rp.p + d + 1.0) / (-(rp.p + d) - 1.0);
      out.value = out.partial_sums.back() + remainder;
    }
  }
  return out;
}

IntegrabilityReport check_integrability(const Kernel& k, const quad::Options& opt) {
  IntegrabilityReport rep;
  rep.mixed = mixed_moment(k, opt);
  rep.log_tail = log_tail_moment(k, 1.0, opt);
  rep.series = tail_series(k, 4096, opt);
  rep.criteria_agree = rep.log_tail.finite == rep.series.finite;
  rep.quadrature_suspect = !rep.criteria_agree;
  return rep;
}

std::string IntegrabilityReport::to_json() const {
  nlohmann::json j;
  j["mixed_moment"] = {{"finite", mixed.finite},
                       {"value", mixed.finite ? mixed.value : 0.0},
                       {"analytic", mixed.analytic}};
  j["log_tail"] = {{"finite", log_tail.finite},
                   {"value", log_tail.finite ? log_tail.value : 0.0},
                   {"analytic", log_tail.analytic}};
  std::vector<double> dyadic;
  for (std::size_t m = 1; m <= series.partial_sums.size(); m *= 2)
    dyadic.push_back(series.partial_sums[m - 1]);
  j["tail_series"] = {{"finite", series.finite},
                      {"value", series.finite ? series.value : 0.0},
                      {"capped", series.capped},
                      {"cap_horizon", series.cap_horizon},
                      {"dyadic_partial_sums", dyadic}};
  j["criteria_agree"] = criteria_agree;
  j["quadrature_suspect"] = quadrature_suspect;
  return j.dump(2);
}

// ---- Kernel1D ----------------------------------------------------------------

Kernel1D Kernel1D::power_law(double coef, double exponent, double hole) {
  Kernel1D k;
  k.form_ = Form::PowerLaw;
  k.pl_coef_ = coef;
  k.pl_exp_ = exponent;
  k.hole_ = hole;
  k.pl_from_ = hole;
  k.decay_exp_ = exponent;
  return k;
}

Kernel1D Kernel1D::box(double height, double radius, double hole) {
  Kernel1D k;
  k.form_ = Form::Box;
  k.box_h_ = height;
  k.box_r_ = radius;
  k.hole_ = hole;
  k.support_ = radius;
  return k;
}

Kernel1D Kernel1D::numeric(std::function<double(double)> fn, double support,
                           double hole, std::vector<double> breaks,
                           std::optional<double> decay_exp,
                           std::optional<std::pair<double, double>> powerlaw_beyond) {
  Kernel1D k;
  k.form_ = Form::Numeric;
  k.fn_ = std::move(fn);
  k.support_ = support;
  k.hole_ = hole;
  std::sort(breaks.begin(), breaks.end());
  k.breaks_ = std::move(breaks);
  k.decay_exp_ = decay_exp;
  if (powerlaw_beyond) {
    k.pl_coef_ = powerlaw_beyond->first;
    k.pl_exp_ = powerlaw_beyond->second;
    k.pl_from_ = k.breaks_.empty() ? 0.0 : k.breaks_.back();
  }
  return k;
}

double Kernel1D::operator()(double r) const {
  r = std::abs(r);
  if ((hole_ > 0.0 && r <= hole_) || r > support_) return 0.0;
  switch (form_) {
    case Form::PowerLaw: return pl_coef_ * std::pow(r, pl_exp_);
    case Form::Box: return box_h_;
    case Form::Numeric:
      if (std::isfinite(pl_from_) && r >= pl_from_)
        return pl_coef_ * std::pow(r, pl_exp_);
      return fn_(r);
  }
  return 0.0;
}

double Kernel1D::mass(double a, double b, const quad::Options& opt) const {
  a = std::max(a, hole_);
  b = std::min(b, support_);
  if (!(b > a)) return 0.0;
  switch (form_) {
    case Form::PowerLaw:
      return power_integral(pl_coef_, pl_exp_, a, b);
    case Form::Box:
      return box_h_ * (b - a);
    case Form::Numeric: {
      double total = 0.0;
      if (a >= pl_from_) return power_integral(pl_coef_, pl_exp_, a, b);
      double mid = std::min(b, pl_from_);
      // split at interior breakpoints, GK on each smooth piece
      std::vector<double> cuts{a};
      for (double c : breaks_)
        if (c > a && c < mid) cuts.push_back(c);
      cuts.push_back(mid);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += quad::integrate([this](double r) { return fn_(r); }, cuts[i],
                                 cuts[i + 1], opt)
                     .value;
      if (b > mid) total += power_integral(pl_coef_, pl_exp_, mid, b);
      return total;
    }
  }
  return 0.0;
}

double Kernel1D::tail_mass(double a, const quad::Options& opt) const {
  a = std::max(a, hole_);
  if (std::isfinite(support_)) return mass(a, support_, opt);
  switch (form_) {
    case Form::PowerLaw:
      return power_integral(pl_coef_, pl_exp_, a, kInf);
    case Form::Box:
      return 0.0;  // unreachable: boxes have finite support
    case Form::Numeric: {
      if (a >= pl_from_) return power_integral(pl_coef_, pl_exp_, a, kInf);
      if (std::isfinite(pl_from_))
        return mass(a, pl_from_, opt) +
               power_integral(pl_coef_, pl_exp_, pl_from_, kInf);
      if (decay_exp_ && *decay_exp_ < -1.0) {
        // asymptotic remainder: beyond R the kernel is C x^p to high accuracy
        double R = 64.0 * std::max({a, 1.0, breaks_.empty() ? 0.0 : breaks_.back()});
        double C = fn_(R) / std::pow(R, *decay_exp_);
        return mass(a, R, opt) + power_integral(C, *decay_exp_, R, kInf);
      }
      quad::Result r =
          quad::integrate_tail([this](double x) { return fn_(x); }, a, opt);
      return r.divergent ? kInf : r.value;
    }
  }
  return 0.0;
}

double Kernel1D::excess_tail(double a, const quad::Options& opt) const {
  double lo = std::max(a, hole_);
  switch (form_) {
    case Form::PowerLaw: {
      double m1 = power_integral(pl_coef_, pl_exp_ + 1.0, lo, kInf);
      double m0 = power_integral(pl_coef_, pl_exp_, lo, kInf);
      return m1 - a * m0;
    }
    case Form::Box: {
      if (a >= box_r_) return 0.0;
      double from = std::max(a, hole_);
      return 0.5 * box_h_ * ((box_r_ - a) * (box_r_ - a) - (from - a) * (from - a));
    }
    case Form::Numeric: {
      double total = 0.0;
      double mid = std::isfinite(support_) ? support_ : pl_from_;
      if (lo < mid && std::isfinite(mid)) {
        total += quad::integrate([&](double r) { return (r - a) * fn_(r); }, lo,
                                 mid, opt)
                     .value;
        lo = mid;
      }
      if (!std::isfinite(support_)) {
        if (std::isfinite(pl_from_)) {
          double from = std::max(lo, pl_from_);
          total += power_integral(pl_coef_, pl_exp_ + 1.0, from, kInf) -
                   a * power_integral(pl_coef_, pl_exp_, from, kInf);
        } else if (decay_exp_ && *decay_exp_ < -2.0) {
          double R = 64.0 * std::max({a, 1.0, breaks_.empty() ? 0.0 : breaks_.back()});
          total += quad::integrate([&](double x) { return (x - a) * fn_(x); },
                                   lo, R, opt)
                       .value;
          double C = fn_(R) / std::pow(R, *decay_exp_);
          total += power_integral(C, *decay_exp_ + 1.0, R, kInf) -
                   a * power_integral(C, *decay_exp_, R, kInf);
        } else {
          quad::Result r = quad::integrate_tail(
              [&](double x) { return (x - a) * fn_(x); }, lo, opt);
          total += r.divergent ? kInf : r.value;
        }
      }
      return total;
    }
  }
  return 0.0;
}

// ---- marginal / line kernel -------------------------------------------------

namespace {

// Transverse integral of the kernel along direction e at offset r*xi:
//   int_{z0}^{inf} eval(z e + r xi) dz, both signs of e. Throws when the
//   improper part fails to converge. The integrand plateaus until z ~ |r|
//   before its power decay sets in, so the improper part starts there;
//   otherwise far offsets exhaust the doubling budget inside the plateau.
double transverse_integral(const Kernel& k, const Vec& xi, double r, double z0) {
  Vec e = perp(xi);
  auto one_side = [&](double sgn) {
    auto f = [&, sgn](double z) {
      Vec h = vec2(sgn * z * e[0] + r * xi[0], sgn * z * e[1] + r * xi[1]);
      return k(h);
    };
    double sup = k.support_radius();
    if (std::isfinite(sup)) {
      double z1 = sup * sup - r * r;
      if (z1 <= 0.0) return 0.0;
      z1 = std::sqrt(z1);
      if (z1 <= z0) return 0.0;
      return quad::integrate(f, z0, z1).value;
    }
    double zc = std::max({z0, std::abs(r), 1.0});
    double head = zc > z0 ? quad::integrate(f, z0, zc).value : 0.0;
    quad::Result res = quad::integrate_tail(f, zc);
    if (res.divergent)
      throw std::runtime_error("marginal: transverse integral diverges");
    return head + res.value;
  };
  return one_side(1.0) + one_side(-1.0);
}

}  // namespace

Kernel1D marginal(const Kernel& k, const Vec& xi, MarginalMethod method) {
  if (std::abs(norm(xi) - 1.0) > 1e-9)
    throw std::invalid_argument("marginal: xi must be a unit vector");
  const KernelSpec& sp = k.spec();
  double sc = k.scale_factor();
  double rho_hat = k.inner_radius();

  if (sp.dim == 1) {
    switch (sp.kind) {
      case KernelKind::Fractional:
        return Kernel1D::power_law(std::pow(sc, 2.0 * sp.s), -1.0 - 2.0 * sp.s,
                                   rho_hat);
      case KernelKind::Indicator:
        return Kernel1D::box(1.0 / sc, sp.radius * sc, rho_hat);
      default:
        throw std::logic_error("marginal: unsupported 1D kind");
    }
  }

  if (method == MarginalMethod::Quadrature) {
    Kernel kc = k;
    Vec dir = xi;
    auto fn = [kc, dir](double r) {
      double z0 = 0.0;
      double rh = kc.inner_radius();
      if (std::abs(r) < rh) z0 = std::sqrt(rh * rh - r * r);
      return transverse_integral(kc, dir, std::abs(r), z0);
    };
    std::vector<double> breaks;
    if (rho_hat > 0.0) breaks.push_back(rho_hat);
    double sup = k.support_radius();
    if (std::isfinite(sup)) breaks.push_back(sup);
    return Kernel1D::numeric(fn, std::isfinite(sup) ? sup : kInf, 0.0, breaks,
                             k.decay_order() ? std::optional<double>(*k.decay_order() + 1.0)
                                             : std::nullopt);
  }

  switch (sp.kind) {
    case KernelKind::Fractional: {
      double coef = std::pow(sc, 2.0 * sp.s) * c_marginal(sp.s);
      double expo = -1.0 - 2.0 * sp.s;
      if (rho_hat == 0.0) return Kernel1D::power_law(coef, expo);
      // truncated: the power law holds beyond rho_hat; inside, the hole
      // removes the central transverse chunk
      double s = sp.s, sc2s = std::pow(sc, 2.0 * sp.s);
      auto fn = [rho_hat, s, sc2s](double r) {
        r = std::abs(r);
        double z0 = std::sqrt(std::max(rho_hat * rho_hat - r * r, 0.0));
        auto f = [r, s, sc2s](double z) {
          return sc2s * std::pow(z * z + r * r, -(1.0 + s));
        };
        return 2.0 * quad::integrate_tail(f, z0).value;
      };
      return Kernel1D::numeric(fn, kInf, 0.0, {rho_hat}, expo,
                               std::make_pair(coef, expo));
    }
    case KernelKind::AnisoFractional: {
      // gauge is positively homogeneous, so the marginal is an exact power
      // law with a per-direction constant
      double s = sp.s;
      Vec e = perp(xi);
      NormBall ball = sp.ball;
      auto gaugeline = [ball, e, xi, s](double t) {
        Vec v = vec2(t * e[0] + xi[0], t * e[1] + xi[1]);
        return std::pow(ball.gauge(v), -(2.0 + 2.0 * s));
      };
      double ck = quad::integrate_tail(gaugeline, 0.0).value +
                  quad::integrate_tail([&](double t) { return gaugeline(-t); }, 0.0).value;
      double coef = std::pow(sc, 2.0 * s) * ck;
      double expo = -1.0 - 2.0 * s;
      if (rho_hat == 0.0) return Kernel1D::power_law(coef, expo);
      Kernel kc = k;
      Vec dir = xi;
      auto fn = [kc, dir, rho_hat, coef, expo](double r) {
        r = std::abs(r);
        if (r >= rho_hat) return coef * std::pow(r, expo);
        double z0 = std::sqrt(rho_hat * rho_hat - r * r);
        return transverse_integral(kc, dir, r, z0);
      };
      return Kernel1D::numeric(fn, kInf, 0.0, {rho_hat}, expo,
                               std::make_pair(coef, expo));
    }
    case KernelKind::Indicator: {
      double R_hat = sp.radius * sc;
      double dens = std::pow(sc, -2.0);
      auto fn = [R_hat, rho_hat, dens](double r) {
        r = std::abs(r);
        if (r >= R_hat) return 0.0;
        double chord = 2.0 * std::sqrt(R_hat * R_hat - r * r);
        if (r < rho_hat) chord -= 2.0 * std::sqrt(rho_hat * rho_hat - r * r);
        return dens * chord;
      };
      std::vector<double> breaks{R_hat};
      if (rho_hat > 0.0) breaks.push_back(rho_hat);
      return Kernel1D::numeric(fn, R_hat, 0.0, breaks, std::nullopt);
    }
  }
  throw std::logic_error("marginal: unreachable");
}

Kernel1D line_kernel(const Kernel& k, const Vec& xi) {
  if (std::abs(norm(xi) - 1.0) > 1e-9)
    throw std::invalid_argument("line_kernel: xi must be a unit vector");
  const KernelSpec& sp = k.spec();
  double sc = k.scale_factor();
  double rho_hat = k.inner_radius();
  if (sp.dim == 1) return marginal(k, xi);  // |t|^0 weight: the kernel itself

  switch (sp.kind) {
    case KernelKind::Fractional:
      return Kernel1D::power_law(std::pow(sc, 2.0 * sp.s), -1.0 - 2.0 * sp.s,
                                 rho_hat);
    case KernelKind::AnisoFractional: {
      double g = sp.ball.gauge(xi);
      double coef = std::pow(sc, 2.0 * sp.s) * std::pow(g, -(2.0 + 2.0 * sp.s));
      return Kernel1D::power_law(coef, -1.0 - 2.0 * sp.s, rho_hat);
    }
    case KernelKind::Indicator: {
      double R_hat = sp.radius * sc;
      double dens = std::pow(sc, -2.0);
      auto fn = [R_hat, dens](double t) {
        t = std::abs(t);
        return t <= R_hat ? dens * t : 0.0;
      };
      return Kernel1D::numeric(fn, R_hat, rho_hat, {R_hat}, std::nullopt);
    }
  }
  throw std::logic_error("line_kernel: unreachable");
}

}  // namespace nlphase
