// Numerical checks of the integral-geometric identities used by the far-field
// estimates: the line-slicing identity (double spatial integrals equal
// line-measure integrals with the |y-x|^{N-1} Jacobian), the tube-volume
// bound for unions of flat pieces, and the line-kernel far-field integral
// F(xi) with its sphere average. Planar (N = 2) throughout.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nlphase/common.hpp"
#include "nlphase/fields.hpp"
#include "nlphase/kernels.hpp"

namespace nlphase {

struct Rect {
  Vec lo{}, hi{};
};

// A sampled line: direction xi, basepoint z * perp(xi), and the Monte Carlo
// weight implementing the (1/2) int_{S^1} int_{xi^perp} normalization.
struct LineSample {
  Vec xi{};
  double z = 0.0;
  double weight = 0.0;
};

struct SliceCheck {
  double lhs = 0.0;      // direct double-integral quadrature
  double rhs_mc = 0.0;   // Monte Carlo over lines with per-line 1D x 1D quadrature
  double stderr_mc = 0.0;
  double rel_err = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  bool identity_violation = false;  // zero lhs but rhs beyond 3 standard errors
  std::string to_json() const;
};

// Checks int_A int_B f = int_lines int int f |y-x| over the clipped segments.
SliceCheck bp_check(const std::function<double(Vec, Vec)>& f, Rect A, Rect B,
                    long samples, std::uint64_t seed, int threads = 1);

struct SteinerCheck {
  double tube_measure = 0.0;  // grid-counted area of the delta-neighborhood
  double bound = 0.0;         // 2 pi delta H^{N-1}(X)
  double grid_tol = 0.0;      // counting-error allowance
  bool holds = false;
  std::string to_json() const;
};

// Tube-measure bound for a union of segments with (near-)null pairwise
// overlaps; delta should be small against the piece lengths.
SteinerCheck steiner_check(const std::vector<std::pair<Vec, Vec>>& segments,
                           double delta, int grid_n = 2048);

// Least-squares fit tube(delta) ~ c1 * delta + c2 * delta^2 over a sweep;
// returns {c1, c2}.
std::pair<double, double> steiner_leading_fit(
    const std::vector<std::pair<Vec, Vec>>& segments,
    const std::vector<double>& deltas, int grid_n = 2048);

struct FarfieldReport {
  std::vector<double> directions;  // angles
  std::vector<double> values;     // F(xi) per direction
  double sphere_integral = 0.0;
  double log_tail_bound = 0.0;  // log-weighted kernel tail from radius 2
  bool holds = false;           // sphere integral <= bound (+ tolerance)
  bool divergent = false;       // expected for kernels failing the tail test
  std::string to_json() const;
};

// F(xi) = int over the two half-lines {s <= -1, t >= 1} of J^xi(t - s),
// computed as int_2^inf (u - 2) J^xi(u) du (the diagonal fiber {t-s=u} has
// length u - 2); the sphere integral uses a trapezoid direction grid.
double farfield_line_integral(const Kernel& J, const Vec& xi);
FarfieldReport farfield_sphere_check(const Kernel& J, int directions = 64);

}  // namespace nlphase
