// Anisotropic surface tension via the 1D cell reduction: for a profile
// u(x) = g(<x, xi>) the strip energy per unit interface area equals
//   (1/4) iint m_xi(r) |g(t+r) - g(t)|^2 dr dt + int W(g(t)) dt
// where m_xi is the directional marginal of the kernel (see
// docs/cell-reduction.md for the derivation). The minimization runs over
// monotone profiles with pinned asymptotes; tail contributions outside the
// sample window are handled in closed form through the marginal's tail
// integrals.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlphase/fields.hpp"
#include "nlphase/kernels.hpp"
#include "nlphase/potentials.hpp"

namespace nlphase {

// Monotone transition profile sampled at midpoints of [-L, L], with constant
// tails lo_tail / hi_tail outside the window.
struct Profile {
  double half_length = 20.0;
  std::vector<double> samples;
  double lo_tail = -1.0;
  double hi_tail = 1.0;

  int size() const { return static_cast<int>(samples.size()); }
  double dt() const { return 2.0 * half_length / size(); }
  double t(int i) const { return -half_length + (i + 0.5) * dt(); }

  // monotone, values in [-1,1], endpoints within tol of the tails
  bool admissible(double tol = 1e-3, std::string* why = nullptr) const;

  Profile resampled(double new_half_length, int new_samples) const;

  static Profile sign_profile(double half_length, int samples);
  static Profile tanh_profile(double half_length, int samples, double width);

  std::string to_text() const;  // two-column t value
};

// In-place L2 projection onto nondecreasing sequences (pool adjacent
// violators).
void project_monotone(std::vector<double>& v);

struct CellEnergy {
  double core = 0.0;      // window-window pair interactions
  double tails = 0.0;     // window against the constant tails
  double tail_tail = 0.0; // the two tails against each other
  double potential = 0.0;
  double total = 0.0;
};

// Strip energy per unit area of the profile. Throws if the profile is not
// admissible for its tail conventions.
CellEnergy cell_energy_1d(const Profile& p, const Kernel1D& m, const DoubleWell& W);

struct CellOptions {
  double window_factor = 20.0;  // half-window = factor * characteristic length
  int samples = 2048;
  int max_iterations = 5000;
  double rel_tol = 1e-8;  // stop when the relative decrease over a patience
  int patience = 50;      // window of iterations falls below rel_tol
  MarginalMethod marginal_method = MarginalMethod::Auto;
};

struct SurfaceTension {
  Vec xi{};
  double value = 0.0;
  Profile profile;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // energy per accepted iterate, nonincreasing
};

// Projected descent (clamp to [-1,1], monotone projection, recenter at the
// median crossing) from the given initialization.
SurfaceTension optimize_profile(const Kernel1D& m, const DoubleWell& W,
                                const Profile& init, const CellOptions& opt = {});

// Surface tension for interface normal xi: marginal reduction + profile
// optimization from a tanh initialization. Results are cached per
// (kernel, potential, xi, options).
SurfaceTension surface_tension(const Vec& xi, const Kernel& J, const DoubleWell& W,
                               const CellOptions& opt = {});

// Truncated-kernel variant (kernel zeroed on the ball of radius rho).
SurfaceTension surface_tension_truncated(const Vec& xi, const Kernel& J, double rho,
                                         const DoubleWell& W,
                                         const CellOptions& opt = {});

// Limit functional of a polyhedral interface: sum of psi(normal) * measure
// over facets.
double limit_energy(const PolyhedralInterface& sigma, const Kernel& J,
                    const DoubleWell& W, const CellOptions& opt = {});

// Caller-facing wrapper over fields: +infinity unless the field is (within
// tol) +-1 valued and comes with a polyhedral jump-set description.
double limit_energy_of_field(const Field& u,
                             const std::optional<PolyhedralInterface>& sigma,
                             const Kernel& J, const DoubleWell& W,
                             double tol = 1e-9, const CellOptions& opt = {});

}  // namespace nlphase
