// Nonlocal energy evaluation. The kinetic part
//   (1/4 eps) int_A int_B J_eps(y-x) |u(y)-u(x)|^2
// is discretized with per-offset cell-averaged kernel weights shared by the
// direct O(|A||B|) evaluator and the FFT evaluator, so the two paths agree to
// accumulation error. Periodic grids are tori: weights fold the kernel over
// the period lattice.
#pragma once

#include <memory>
#include <string>

#include "nlphase/fields.hpp"
#include "nlphase/kernels.hpp"
#include "nlphase/potentials.hpp"

namespace nlphase {

// Per-offset weight table for one (kernel, eps, grid) triple. Weights are
// cell-averaged densities: w_k = cellvol^{-1} int_{cell k} J_eps(h) dh, with
// w_0 = 0 (zero-offset pairs of a cellwise-constant field cannot contribute).
struct OffsetTable {
  Grid grid;
  double eps = 1.0;
  std::vector<double> w;  // periodic: ncells entries; boxed: (2nx-1)*(2ny-1)
  double wsum = 0.0;      // sum of weights (used by the spectral identity)
  double tail_mass = 0.0; // kernel mass beyond the folded horizon (periodic)
  int prune_rx = 0, prune_ry = 0;  // all nonzero weights lie within this box

  bool periodic() const { return grid.boundary == Boundary::Periodic; }
  // offset (ki, kj) in cells; periodic offsets are wrapped, boxed offsets
  // must satisfy |ki| < nx, |kj| < ny
  double weight(int ki, int kj) const;
  long weight_index(int ki, int kj) const;
};

// Cached table lookup (process-wide, mutex-guarded).
std::shared_ptr<const OffsetTable> offset_table(const Kernel& J, double eps,
                                                const Grid& g);

struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  std::string path;        // "fast" or "direct"
  double tail_bound = 0.0; // energy bound on the neglected far field
  double epsilon = 0.0;
  double rho = 0.0;        // inner truncation in effect
  std::string to_json() const;
};

// Double sum over cell pairs (A x B) with per-offset weights.
double kinetic_direct(const Field& u, const Mask& A, const Mask& B,
                      const Kernel& J, double eps);
// Spectral evaluation over the full periodic domain; throws on boxed grids.
double kinetic_fast(const Field& u, const Kernel& J, double eps);
// (1/eps) int_A W(u)
double potential_energy(const Field& u, const Mask& A, const DoubleWell& W,
                        double eps);
// Kinetic + potential with automatic path choice (fast when A is the full
// periodic domain).
EnergyBreakdown total_energy(const Field& u, const Mask& A, const Kernel& J,
                             const DoubleWell& W, double eps);
// Same with the kernel truncated to zero on the ball of radius rho (base
// coordinates), 0 < rho < 1.
EnergyBreakdown truncated_energy(const Field& u, const Mask& A, const Kernel& J,
                                 double rho, const DoubleWell& W, double eps);

// Kinetic energy between two regions (A != B allowed), direct path.
inline double kinetic_between(const Field& u, const Mask& A, const Mask& B,
                              const Kernel& J, double eps) {
  return kinetic_direct(u, A, B, J, eps);
}

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Near-field bound: int_A J_eps(y-x) g(x) dx <= a*b*M_J*eps for any
// 0 <= g <= ((a|y-x|) ^ b)^2, evaluated at the extremal g. Requires b >= a*eps.
// The region A is an axis box.
BoundCheck interior_bound(const Kernel& J, double eps, double a, double b,
                          int dim, Vec box_lo, Vec box_hi, Vec y);

// Far-field bound: kinetic(u, E, F) <= (1/2 delta) tail_moment(J, eps/delta)
// int_{E u F} u^2, requiring the cell-set distance to be >= delta (verified
// with a one-cell-diagonal cushion via the distance transform).
BoundCheck separation_bound(const Field& u, const Mask& E, const Mask& F,
                            const Kernel& J, double eps, double delta);

// Gradient of the discrete kinetic energy over the full domain with respect
// to the cell values.
Field kinetic_gradient(const Field& u, const Kernel& J, double eps);

// Circular convolution u * w on the grid via FFT (periodic grids).
std::vector<double> circular_convolve(const Grid& g, const std::vector<double>& w,
                                      const std::vector<double>& u);

}  // namespace nlphase
