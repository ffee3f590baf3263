#include "nlphase/potentials.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nlphase {

DoubleWell make_quartic() {
  DoubleWell w;
  w.name = "quartic";
  w.eval = [](double z) {
    double t = 1.0 - z * z;
    return t * t;
  };
  w.deriv = [](double z) { return -4.0 * z * (1.0 - z * z); };
  w.growth_C = 1.0;
  w.growth_R = 2.0;
  w.max_on_wells_interval = 1.0;  // attained at z = 0
  return w;
}

DoubleWell make_dist2() {
  DoubleWell w;
  w.name = "dist2";
  w.eval = [](double z) {
    double d = std::abs(z) - 1.0;
    return d * d;
  };
  w.deriv = [](double z) {
    if (z == 0.0) return 0.0;  // kink at the midpoint; subgradient 0
    return 2.0 * (std::abs(z) - 1.0) * (z > 0 ? 1.0 : -1.0);
  };
  w.growth_C = 0.5;
  w.growth_R = 3.0;
  w.max_on_wells_interval = 1.0;  // attained at z = 0
  return w;
}

DoubleWell make_potential(const std::string& name) {
  if (name == "quartic") return make_quartic();
  if (name == "dist2") return make_dist2();
  std::ostringstream os;
  os << "unknown potential '" << name << "'; available:";
  for (const auto& n : potential_names()) os << " " << n;
  throw std::invalid_argument(os.str());
}

std::vector<std::string> potential_names() { return {"quartic", "dist2"}; }

WellCheck verify_double_well(const DoubleWell& w, const std::vector<double>& grid) {
  WellCheck out;
  const double well_tol = 1e-12;
  const double zero_exclusion = 1e-4;  // grid resolution guard around the wells
  for (double z : grid) {
    double v = w.eval(z);
    if (!(v >= 0.0)) {
      out.pass = false;
      out.failure = "negative value";
      out.location = z;
      return out;
    }
    bool at_well = std::abs(std::abs(z) - 1.0) < zero_exclusion;
    if (at_well && std::abs(std::abs(z) - 1.0) < 1e-9 && v > well_tol) {
      out.pass = false;
      out.failure = "does not vanish at the wells";
      out.location = z;
      return out;
    }
    if (!at_well && v <= 0.0) {
      out.pass = false;
      out.failure = "vanishes away from the wells";
      out.location = z;
      return out;
    }
    if (std::abs(z) >= w.growth_R && v < w.growth_C * std::abs(z)) {
      out.pass = false;
      out.failure = "linear growth bound fails";
      out.location = z;
      return out;
    }
  }
  return out;
}

WellCheck verify_double_well(const DoubleWell& w, int samples) {
  double lo = -w.growth_R - 2.0, hi = w.growth_R + 2.0;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(samples) + 2);
  for (int i = 0; i < samples; ++i)
    grid.push_back(lo + (hi - lo) * i / (samples - 1));
  grid.push_back(-1.0);  // exact well points
  grid.push_back(1.0);
  return verify_double_well(w, grid);
}

}  // namespace nlphase
