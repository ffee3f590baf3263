// Adaptive quadrature used throughout the kernel/moment machinery.
//
// Finite intervals use Gauss-Kronrod 7/15 with error-driven bisection.
// Improper upper limits use doubling horizons; integrable singularities at the
// origin use dyadic shells. Refinement increments are recorded so callers can
// apply the divergence rule: a sequence whose increments fail to contract by a
// factor >= 2 over 5 successive levels is declared divergent.
#pragma once

#include <functional>
#include <vector>

namespace nlphase::quad {

struct Options {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  int max_evals = 400000;
  int max_levels = 64;  // doubling horizons / dyadic shells
};

struct Result {
  double value = 0.0;
  double error = 0.0;  // estimate
  long evals = 0;
  bool converged = false;
  bool divergent = false;
  std::vector<double> increments;  // per-level refinement increments, when leveled

  double tolerance_for(const Options& o) const;
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// Divergence rule on a sequence of |increments|.
bool increments_diverge(const std::vector<double>& inc);

// Integral over [a, b]; integrand must be finite on the closed interval
// (endpoint singularities belong to integrate_to_zero).
Result integrate(const Fn1& f, double a, double b, const Options& opt = {});

// Integral over [a, +inf). Panels double in width; a geometric remainder
// extrapolation closes the tail when increments contract.
Result integrate_tail(const Fn1& f, double a, const Options& opt = {});

// Integral over (0, b] with an integrable singularity allowed at 0.
Result integrate_to_zero(const Fn1& f, double b, const Options& opt = {});

// Integral over an axis-aligned rectangle, adaptive quadtree splitting.
Result integrate2(const Fn2& f, double ax, double bx, double ay, double by,
                  const Options& opt = {});

}  // namespace nlphase::quad
