// Double-well potentials: nonnegative, vanishing at z = -1 and z = +1 only,
// with at least linear growth beyond a certified radius.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nlphase {

struct DoubleWell {
  std::string name;
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  double growth_C = 0.0;  // W(z) >= growth_C * |z| for |z| >= growth_R
  double growth_R = 0.0;
  double max_on_wells_interval = 0.0;  // max of W over [-1, 1]

  double operator()(double z) const { return eval(z); }
};

// W(z) = (1 - z^2)^2, growth constants C=1, R=2.
DoubleWell make_quartic();
// W(z) = dist(z, {-1, +1})^2, growth constants C=1/2, R=3.
DoubleWell make_dist2();
// Lookup by preset name ("quartic", "dist2"); throws with a suggestion list
// on unknown names.
DoubleWell make_potential(const std::string& name);
std::vector<std::string> potential_names();

struct WellCheck {
  bool pass = true;
  std::string failure;   // description of the first violation
  double location = 0.0  ;
};

// Sampled verification of the double-well requirements: zeros exactly at +-1,
// positivity elsewhere, and the linear growth bound beyond growth_R. The
// sample set must cover [-growth_R - 2, growth_R + 2].
WellCheck verify_double_well(const DoubleWell& w, const std::vector<double>& grid);
WellCheck verify_double_well(const DoubleWell& w, int samples = 20001);

}  // namespace nlphase
