#include "nlphase/cell.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace nlphase {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---- Profile -------------------------------------------------------------------

bool Profile::admissible(double tol, std::string* why) const {
  if (samples.size() < 4) {
    if (why) *why = "profile needs at least 4 samples";
    return false;
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (std::abs(samples[i]) > 1.0 + 1e-12) {
      if (why) *why = "profile value outside [-1,1]";
      return false;
    }
    if (i > 0 && samples[i] < samples[i - 1] - 1e-12) {
      if (why) *why = "profile not monotone";
      return false;
    }
  }
  if (std::abs(samples.front() - lo_tail) > tol) {
    if (why) *why = "window too small: left endpoint does not reach the tail value";
    return false;
  }
  if (std::abs(samples.back() - hi_tail) > tol) {
    if (why) *why = "window too small: right endpoint does not reach the tail value";
    return false;
  }
  return true;
}

Profile Profile::resampled(double new_half_length, int new_samples) const {
  Profile out;
  out.half_length = new_half_length;
  out.lo_tail = lo_tail;
  out.hi_tail = hi_tail;
  out.samples.resize(static_cast<std::size_t>(new_samples));
  for (int i = 0; i < new_samples; ++i) {
    double tt = -new_half_length + (i + 0.5) * 2.0 * new_half_length / new_samples;
    if (tt <= t(0)) {
      out.samples[static_cast<std::size_t>(i)] =
          tt < -half_length ? lo_tail : samples.front();
    } else if (tt >= t(size() - 1)) {
      out.samples[static_cast<std::size_t>(i)] =
          tt > half_length ? hi_tail : samples.back();
    } else {
      double u = (tt - t(0)) / dt();
      int j = static_cast<int>(std::floor(u));
      double frac = u - j;
      out.samples[static_cast<std::size_t>(i)] =
          samples[static_cast<std::size_t>(j)] * (1.0 - frac) +
          samples[static_cast<std::size_t>(j + 1)] * frac;
    }
  }
  return out;
}

Profile Profile::sign_profile(double half_length, int samples) {
  Profile p;
  p.half_length = half_length;
  p.samples.resize(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    p.samples[static_cast<std::size_t>(i)] = p.t(i) > 0.0 ? 1.0 : -1.0;
  return p;
}

Profile Profile::tanh_profile(double half_length, int samples, double width) {
  Profile p;
  p.half_length = half_length;
  p.samples.resize(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    p.samples[static_cast<std::size_t>(i)] = std::tanh(p.t(i) / width);
  return p;
}

std::string Profile::to_text() const {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < size(); ++i) os << t(i) << " " << samples[static_cast<std::size_t>(i)] << "\n";
  return os.str();
}

void project_monotone(std::vector<double>& v) {
  // pool adjacent violators with block averaging
  const std::size_t n = v.size();
  std::vector<double> mean(n), weight(n);
  std::vector<std::size_t> len(n);
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean[blocks] = v[i];
    weight[blocks] = 1.0;
    len[blocks] = 1;
    ++blocks;
    while (blocks > 1 && mean[blocks - 2] > mean[blocks - 1]) {
      double w = weight[blocks - 2] + weight[blocks - 1];
      mean[blocks - 2] =
          (mean[blocks - 2] * weight[blocks - 2] + mean[blocks - 1] * weight[blocks - 1]) / w;
      weight[blocks - 2] = w;
      len[blocks - 2] += len[blocks - 1];
      --blocks;
    }
  }
  std::size_t idx = 0;
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t k = 0; k < len[b]; ++k) v[idx++] = mean[b];
}

// ---- cell energy ------------------------------------------------------------------

namespace {

// Precomputed per-(marginal, window, resolution) integrals.
struct CellTables {
  std::vector<double> omega;  // omega[k] = (1/dt) * mass over offset cell k, k>=1
  int max_offset = 0;         // omega[k] == 0 for k > max_offset
  std::vector<double> tail;   // tail[j] = int_{(j+1/2) dt}^{inf} m(r) dr
  double tail_tail = 0.0;     // 2 * int_{2L}^{inf} (r - 2L) m(r) dr
};

CellTables build_cell_tables(const Kernel1D& m, double half_length, int samples) {
  CellTables tab;
  const double dt = 2.0 * half_length / samples;
  tab.omega.assign(static_cast<std::size_t>(samples), 0.0);
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-9;
  double sup = m.support();
  tab.max_offset = 0;
  for (int k = 1; k < samples; ++k) {
    double a = (k - 0.5) * dt, b = (k + 0.5) * dt;
    if (a > sup) break;
    double w = m.mass(a, b, opt) / dt;
    tab.omega[static_cast<std::size_t>(k)] = w;
    if (w != 0.0) tab.max_offset = k;
  }
  // cumulative tail integrals on the half-open grid (j+1/2) dt
  tab.tail.assign(static_cast<std::size_t>(samples), 0.0);
  double far = (samples - 0.5) * dt;
  double run = m.tail_mass(far, opt);
  tab.tail[static_cast<std::size_t>(samples - 1)] = run;
  for (int j = samples - 2; j >= 0; --j) {
    run += m.mass((j + 0.5) * dt, (j + 1.5) * dt, opt);
    tab.tail[static_cast<std::size_t>(j)] = run;
  }
  tab.tail_tail = 2.0 * m.excess_tail(2.0 * half_length, opt);
  return tab;
}

CellEnergy energy_with_tables(const Profile& p, const CellTables& tab,
                              const DoubleWell& W) {
  const int n = p.size();
  const double dt = p.dt();
  const std::vector<double>& g = p.samples;
  Accumulator core;
  for (int k = 1; k <= tab.max_offset && k < n; ++k) {
    double w = tab.omega[static_cast<std::size_t>(k)];
    if (w == 0.0) continue;
    double s = 0.0;
    for (int i = 0; i + k < n; ++i) {
      double d = g[static_cast<std::size_t>(i + k)] - g[static_cast<std::size_t>(i)];
      s += d * d;
    }
    core.add(w * s);
  }
  Accumulator tails, pot;
  for (int i = 0; i < n; ++i) {
    double gi = g[static_cast<std::size_t>(i)];
    double up = p.hi_tail - gi;
    double dn = p.lo_tail - gi;
    tails.add(up * up * tab.tail[static_cast<std::size_t>(n - 1 - i)] +
              dn * dn * tab.tail[static_cast<std::size_t>(i)]);
    pot.add(W.eval(gi));
  }
  CellEnergy e;
  // ordered pairs count both directions: factor 2 against the 1/4 prefactor
  e.core = 0.5 * dt * dt * core.value();
  e.tails = 0.5 * dt * tails.value();
  e.tail_tail = tab.tail_tail;
  e.potential = dt * pot.value();
  e.total = e.core + e.tails + e.tail_tail + e.potential;
  return e;
}

void gradient_with_tables(const Profile& p, const CellTables& tab,
                          const DoubleWell& W, std::vector<double>& grad) {
  const int n = p.size();
  const double dt = p.dt();
  const std::vector<double>& g = p.samples;
  grad.assign(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k <= tab.max_offset && k < n; ++k) {
    double w = tab.omega[static_cast<std::size_t>(k)];
    if (w == 0.0) continue;
    for (int i = 0; i + k < n; ++i) {
      double d = g[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i + k)];
      double t = dt * dt * w * d;
      grad[static_cast<std::size_t>(i)] += t;
      grad[static_cast<std::size_t>(i + k)] -= t;
    }
  }
  for (int i = 0; i < n; ++i) {
    double gi = g[static_cast<std::size_t>(i)];
    grad[static_cast<std::size_t>(i)] +=
        dt * ((gi - p.hi_tail) * tab.tail[static_cast<std::size_t>(n - 1 - i)] +
              (gi - p.lo_tail) * tab.tail[static_cast<std::size_t>(i)]);
    grad[static_cast<std::size_t>(i)] += dt * W.deriv(gi);
  }
}

// shift the samples so the median crossing sits at the window center
void recenter(Profile& p) {
  const int n = p.size();
  const double mid = 0.5 * (p.lo_tail + p.hi_tail);
  int cross = n;
  for (int i = 0; i < n; ++i) {
    if (p.samples[static_cast<std::size_t>(i)] >= mid) {
      cross = i;
      break;
    }
  }
  if (cross == n) return;  // never crosses; leave as is
  int shift = cross - n / 2;
  if (shift == 0) return;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int j = i + shift;
    double v;
    if (j < 0) v = p.lo_tail;
    else if (j >= n) v = p.hi_tail;
    else v = p.samples[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = v;
  }
  p.samples = std::move(out);
}

}  // namespace

CellEnergy cell_energy_1d(const Profile& p, const Kernel1D& m, const DoubleWell& W) {
  std::string why;
  if (!p.admissible(1e-3, &why))
    throw std::invalid_argument("cell_energy_1d: inadmissible profile: " + why);
  CellTables tab = build_cell_tables(m, p.half_length, p.size());
  return energy_with_tables(p, tab, W);
}

SurfaceTension optimize_profile(const Kernel1D& m, const DoubleWell& W,
                                const Profile& init, const CellOptions& opt) {
  std::string why;
  if (!init.admissible(1e-3, &why))
    throw std::invalid_argument("optimize_profile: inadmissible init: " + why);
  CellTables tab = build_cell_tables(m, init.half_length, init.size());

  Profile cur = init;
  double energy = energy_with_tables(cur, tab, W).total;
  SurfaceTension out;
  out.trace.push_back(energy);

  std::vector<double> grad;
  double step = 0.5;
  const int n = cur.size();
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    gradient_with_tables(cur, tab, W, grad);
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      Profile cand = cur;
      for (int i = 0; i < n; ++i)
        cand.samples[static_cast<std::size_t>(i)] = std::clamp(
            cand.samples[static_cast<std::size_t>(i)] - step * grad[static_cast<std::size_t>(i)],
            -1.0, 1.0);
      project_monotone(cand.samples);
      recenter(cand);
      double e2 = energy_with_tables(cand, tab, W).total;
      if (e2 < energy) {
        cur = std::move(cand);
        energy = e2;
        out.trace.push_back(energy);
        step *= 1.3;
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-14) break;
    }
    if (!accepted) {
      out.converged = true;  // no descent direction at resolvable step size
      break;
    }
    // relative-decrease stopping rule over a patience window
    int pat = opt.patience;
    if (static_cast<int>(out.trace.size()) > pat) {
      double before = out.trace[out.trace.size() - 1 - static_cast<std::size_t>(pat)];
      if (before - energy < opt.rel_tol * std::max(std::abs(energy), 1e-30)) {
        out.converged = true;
        break;
      }
    }
  }
  out.iterations = iter;
  out.value = energy;
  out.profile = std::move(cur);
  return out;
}

namespace {

std::mutex g_psi_mutex;
std::map<std::string, SurfaceTension> g_psi_cache;

double characteristic_length(const Kernel& J) {
  double s = J.support_radius();
  return std::isfinite(s) ? s : 1.0;
}

std::string psi_key(const Vec& xi, const Kernel& J, const DoubleWell& W,
                    const CellOptions& opt) {
  std::ostringstream os;
  os.precision(17);
  os << J.fingerprint() << "|" << W.name << "|" << xi[0] << "," << xi[1] << "|"
     << opt.window_factor << "," << opt.samples << ","
     << static_cast<int>(opt.marginal_method);
  return os.str();
}

}  // namespace

SurfaceTension surface_tension(const Vec& xi, const Kernel& J, const DoubleWell& W,
                               const CellOptions& opt) {
  std::string key = psi_key(xi, J, W, opt);
  {
    std::lock_guard<std::mutex> lock(g_psi_mutex);
    auto it = g_psi_cache.find(key);
    if (it != g_psi_cache.end()) return it->second;
  }
  Kernel1D m = marginal(J, xi, opt.marginal_method);
  double L = opt.window_factor * characteristic_length(J);
  Profile init = Profile::tanh_profile(L, opt.samples, characteristic_length(J));
  SurfaceTension st = optimize_profile(m, W, init, opt);
  st.xi = xi;
  std::lock_guard<std::mutex> lock(g_psi_mutex);
  g_psi_cache.emplace(key, st);  // keep the first entry on a race
  return st;
}

SurfaceTension surface_tension_truncated(const Vec& xi, const Kernel& J, double rho,
                                         const DoubleWell& W, const CellOptions& opt) {
  return surface_tension(xi, truncated(J, rho), W, opt);
}

double limit_energy(const PolyhedralInterface& sigma, const Kernel& J,
                    const DoubleWell& W, const CellOptions& opt) {
  Accumulator acc;
  for (const auto& f : sigma.facets) {
    SurfaceTension st = surface_tension(f.normal, J, W, opt);
    acc.add(st.value * f.measure);
  }
  return acc.value();
}

double limit_energy_of_field(const Field& u,
                             const std::optional<PolyhedralInterface>& sigma,
                             const Kernel& J, const DoubleWell& W, double tol,
                             const CellOptions& opt) {
  if (!sigma) return kInf;
  for (double v : u.values)
    if (std::abs(std::abs(v) - 1.0) > tol) return kInf;
  return limit_energy(*sigma, J, W, opt);
}

}  // namespace nlphase
