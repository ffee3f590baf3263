// Interaction kernels: construction, scaling, inner truncation, moment and
// tail integrals, integrability checks, and the 1D reductions (directional
// marginal and line kernel) used by the cell problem and the far-field
// estimates.
//
// A kernel J is an even nonnegative weight on displacements. Built-in kinds:
//   fractional          J(h) = |h|^{-dim-2s},          1/2 < s < 1
//   aniso-fractional    J(h) = gauge_K(h)^{-dim-2s}    (norm ball K, dim 2)
//   indicator           J(h) = 1 on |h| <= radius
// all optionally truncated to zero on |h| <= rho and rescaled so that
// eval(h) = scale^{-dim} * J(h/scale).
#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlphase/common.hpp"
#include "nlphase/quadrature.hpp"

namespace nlphase {

enum class KernelKind { Fractional, AnisoFractional, Indicator };

// Unit-ball descriptor for anisotropic kernels: boundary radius sampled on a
// uniform direction grid, interpolated periodically. gauge(h) is the norm
// whose unit ball has that boundary.
class NormBall {
 public:
  NormBall() = default;
  static NormBall disk(double R, int samples = 360);
  static NormBall ellipse(double a, double b, int samples = 720);
  static NormBall from_samples(std::vector<double> radii);

  double boundary_radius(double theta) const;
  double gauge(const Vec& h) const;
  const std::vector<double>& samples() const { return radius_; }

  // Evenness, positivity, boundedness, and a sampled triangle inequality.
  // Throws std::invalid_argument describing the first violation.
  void validate() const;

 private:
  std::vector<double> radius_;
};

struct KernelSpec {
  KernelKind kind = KernelKind::Fractional;
  int dim = 1;
  double s = 0.75;     // fractional kinds
  double radius = 1.0;  // indicator support
  double rho = 0.0;     // inner truncation, 0 = none
  NormBall ball;        // aniso-fractional only

  std::string to_kv() const;
  static KernelSpec parse_kv(const std::string& line);
};

class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(KernelSpec spec);

  double operator()(const Vec& h) const;
  double eval1(double h) const { return (*this)(vec1(h)); }

  int dim() const { return spec_.dim; }
  KernelKind kind() const { return spec_.kind; }
  const KernelSpec& spec() const { return spec_; }
  double scale_factor() const { return scale_; }
  bool radial() const { return spec_.kind != KernelKind::AnisoFractional; }
  // Radial profile value at |h| = r, in evaluated coordinates.
  double radial_value(double r) const;

  double support_radius() const;  // +inf for fractional kinds
  double inner_radius() const;    // evaluated truncation radius, 0 if none
  std::optional<double> singularity_order() const;
  std::optional<double> decay_order() const;

  // kv record including the scale factor; doubles as a cache fingerprint.
  std::string fingerprint() const;

 private:
  friend Kernel scaled(const Kernel&, double);
  friend Kernel truncated(const Kernel&, double);
  KernelSpec spec_;
  double scale_ = 1.0;
};

// Validating constructor; rejects s <= 1/2 (the tail series diverges there),
// nonpositive radii, and malformed norm balls.
Kernel make_kernel(const KernelSpec& spec);
// Diagnostic constructor that skips the s > 1/2 gate so divergence reporting
// can be exercised on failing kernels.
Kernel make_kernel_unchecked(const KernelSpec& spec);

// J_eps(h) = eps^{-dim} J(h/eps); composes multiplicatively.
Kernel scaled(const Kernel& k, double eps);
// Zero on the ball of radius rho (base coordinates); 0 < rho < 1.
Kernel truncated(const Kernel& k, double rho);

// ---- moments -------------------------------------------------------------

struct MomentResult {
  double value = 0.0;
  bool finite = true;
  bool analytic = false;  // closed-form path
  double error = 0.0;
  std::vector<double> increments;
};

// integral of J(h) * min(|h|, |h|^2)
MomentResult mixed_moment(const Kernel& k, const quad::Options& opt = {});
// integral of J(h)|h| over |h| >= 1/t  (tail first moment)
MomentResult tail_moment(const Kernel& k, double t, const quad::Options& opt = {});
// integral of J(h)|h| log|h| over |h| >= lower (lower >= 1)
MomentResult log_tail_moment(const Kernel& k, double lower = 1.0,
                             const quad::Options& opt = {});

struct SeriesCheck {
  std::vector<double> partial_sums;  // S_m for m = 1..n_terms
  double value = 0.0;                // limit estimate when finite
  bool finite = true;
  bool capped = false;       // terms used a capped tail horizon
  double cap_horizon = 0.0;  // the horizon when capped
};

// Partial sums of tail_moment(1/n)/n. For kernels with a known power decay
// the verdict is analytic; divergent tail moments are capped at a recorded
// horizon so the partial-sum growth is still reportable.
SeriesCheck tail_series(const Kernel& k, int n_terms = 4096,
                        const quad::Options& opt = {});

struct IntegrabilityReport {
  MomentResult mixed;     // min(|h|,|h|^2) moment
  MomentResult log_tail;  // log-weighted tail integral over |h| >= 1
  SeriesCheck series;
  bool criteria_agree = true;      // log_tail verdict == series verdict
  bool quadrature_suspect = false; // disagreement beyond the analytic paths
  std::string to_json() const;
};

// Evaluates the log-tail integral and the tail series independently; their
// verdicts must agree, otherwise the report flags a quadrature failure.
IntegrabilityReport check_integrability(const Kernel& k, const quad::Options& opt = {});

// ---- 1D reductions ---------------------------------------------------------

// One-dimensional even kernel with enough structure for exact cell-average
// integrals when the form is known.
class Kernel1D {
 public:
  enum class Form { PowerLaw, Box, Numeric };

  static Kernel1D power_law(double coef, double exponent, double hole = 0.0);
  static Kernel1D box(double height, double radius, double hole = 0.0);
  static Kernel1D numeric(std::function<double(double)> fn, double support,
                          double hole, std::vector<double> breaks,
                          std::optional<double> decay_exp,
                          std::optional<std::pair<double, double>> powerlaw_beyond = {});

  double operator()(double r) const;
  Form form() const { return form_; }
  double support() const { return support_; }
  double hole() const { return hole_; }
  std::optional<double> decay_exponent() const { return decay_exp_; }
  double powerlaw_coef() const { return pl_coef_; }
  double powerlaw_exp() const { return pl_exp_; }

  // integral of the kernel over [a, b], 0 <= a <= b
  double mass(double a, double b, const quad::Options& opt = {}) const;
  // integral over [a, inf)
  double tail_mass(double a, const quad::Options& opt = {}) const;
  // integral of (r - a) * kernel over [a, inf); the straddle-pair tail weight
  double excess_tail(double a, const quad::Options& opt = {}) const;

 private:
  Form form_ = Form::Numeric;
  double support_ = std::numeric_limits<double>::infinity();
  double hole_ = 0.0;
  double pl_coef_ = 0.0, pl_exp_ = 0.0;
  double box_h_ = 0.0, box_r_ = 0.0;
  std::function<double(double)> fn_;
  std::optional<double> decay_exp_;
  double pl_from_ = std::numeric_limits<double>::infinity();  // power law valid beyond
  std::vector<double> breaks_;
};

enum class MarginalMethod { Auto, Quadrature };

// Directional marginal: integral of J over the hyperplane orthogonal to xi,
// J~_xi(r) = int_{xi^perp} J(z + r xi) dz. Even, nonnegative; equals J itself
// in dimension 1. MarginalMethod::Auto uses closed forms for radial power-law
// kernels; Quadrature forces the generic transverse integration (used by the
// isotropy sweeps so symmetry is measured, not assumed).
Kernel1D marginal(const Kernel& k, const Vec& xi,
                  MarginalMethod method = MarginalMethod::Auto);

// Line kernel J^xi(t) = J(t xi) |t|^{dim-1}, the 1D weight seen along a line
// of direction xi.
Kernel1D line_kernel(const Kernel& k, const Vec& xi);

}  // namespace nlphase
