#include "nlphase/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nlphase {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---- schedules -----------------------------------------------------------------

EpsilonSchedule EpsilonSchedule::geometric(double eps0, double factor, int count,
                                           double cells_per_eps) {
  EpsilonSchedule s;
  s.cells_per_eps = cells_per_eps;
  double e = eps0;
  for (int i = 0; i < count; ++i) {
    s.values.push_back(e);
    e *= factor;
  }
  return s;
}

void EpsilonSchedule::validate() const {
  if (values.empty()) throw std::invalid_argument("schedule: empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw std::invalid_argument("schedule: eps must be positive");
    if (i > 0 && !(values[i] < values[i - 1]))
      throw std::invalid_argument("schedule: values must be strictly decreasing");
  }
  if (!(cells_per_eps >= 1.0))
    throw std::invalid_argument("schedule: cells_per_eps must be >= 1");
}

int EpsilonSchedule::resolution(double eps, double extent) const {
  return static_cast<int>(std::ceil(extent * cells_per_eps / eps));
}

Grid EpsilonSchedule::grid1d(double eps, double extent, Boundary b) const {
  return Grid::line(resolution(eps, extent), extent, b);
}

Grid EpsilonSchedule::grid2d(double eps, double lx, double ly, Boundary b) const {
  return Grid::plane(resolution(eps, lx), resolution(eps, ly), lx, ly, b);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---- flat recovery ----------------------------------------------------------------

namespace {

// Signed distance to the interface pair {coord = a} u {coord = b} on a
// periodic axis of length L: positive inside (a, b).
double signed_dist_two_walls(double x, double a, double b, double L) {
  auto wrapdist = [&](double p, double q) {
    double d = std::abs(p - q);
    return std::min(d, L - d);
  };
  double da = wrapdist(x, a), db = wrapdist(x, b);
  double d = std::min(da, db);
  bool inside = x > a && x < b;  // a < b within [0, L)
  return inside ? d : -d;
}

Field profile_field_two_walls(const Grid& g, int axis, double a, double b,
                              const Profile& gamma, double eps) {
  Field u(g, 0.0);
  for (long i = 0; i < g.ncells(); ++i) {
    double x = g.center(i)[axis];
    double s = signed_dist_two_walls(x, a, b, g.extent[axis]) / eps;
    double v;
    if (s <= -gamma.half_length) v = gamma.lo_tail;
    else if (s >= gamma.half_length) v = gamma.hi_tail;
    else {
      double t = (s - gamma.t(0)) / gamma.dt();
      int j = std::clamp(static_cast<int>(std::floor(t)), 0, gamma.size() - 2);
      double frac = std::clamp(t - j, 0.0, 1.0);
      v = gamma.samples[static_cast<std::size_t>(j)] * (1.0 - frac) +
          gamma.samples[static_cast<std::size_t>(j + 1)] * frac;
    }
    u[i] = v;
  }
  return u;
}

RecoveryStep measure_step(const Field& u, const Field& sharp, double eps,
                          const EnergyBreakdown& e) {
  RecoveryStep st;
  st.eps = eps;
  st.energy = e;
  st.l1_to_sharp = lp_distance(u, sharp, 1);
  st.l2_to_sharp = lp_distance(u, sharp, 2);
  st.transition01 = transition_measure(u, 0.1);
  st.transition05 = transition_measure(u, 0.5);
  return st;
}

}  // namespace

RecoveryRun recovery_flat(int axis, double pos_lo, double pos_hi,
                          const EpsilonSchedule& sched, const Kernel& J,
                          const DoubleWell& W, double tolerance_factor,
                          const CellOptions& cell_opt) {
  sched.validate();
  if (!(pos_lo < pos_hi)) throw std::invalid_argument("recovery_flat: need pos_lo < pos_hi");
  Vec nu = axis == 0 ? vec2(1.0, 0.0) : vec2(0.0, 1.0);
  SurfaceTension psi = surface_tension(nu, J, W, cell_opt);

  RecoveryRun run;
  run.tolerance_factor = tolerance_factor;
  // two parallel interfaces of length = transverse extent (unit box): the
  // interface description keeps only the first for the field comparison
  double total_len = 2.0;
  run.target = psi.value * total_len;

  for (double eps : sched.values) {
    Grid g = sched.grid2d(eps);
    Field u = profile_field_two_walls(g, axis, pos_lo, pos_hi, psi.profile, eps);
    Field sharp(g, 0.0);
    for (long i = 0; i < g.ncells(); ++i)
      sharp[i] =
          signed_dist_two_walls(g.center(i)[axis], pos_lo, pos_hi, g.extent[axis]) > 0.0
              ? 1.0
              : -1.0;
    EnergyBreakdown e = total_energy(u, mask_all(g), J, W, eps);
    run.steps.push_back(measure_step(u, sharp, eps, e));
    if (eps == sched.values.back()) run.final_field = u;
  }
  run.limsup_ok = run.steps.back().energy.total <= run.target * tolerance_factor;
  return run;
}

std::string RecoveryRun::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "eps,kinetic,potential,total,l1_to_sharp,l2_to_sharp,transition01,transition05\n";
  for (const auto& s : steps)
    os << s.eps << "," << s.energy.kinetic << "," << s.energy.potential << ","
       << s.energy.total << "," << s.l1_to_sharp << "," << s.l2_to_sharp << ","
       << s.transition01 << "," << s.transition05 << "\n";
  return os.str();
}

// ---- modification ------------------------------------------------------------------

ModifyReport modify(const Field& u, const Field& w, const Mask& D, double delta,
                    double eps, const Kernel& J, const DoubleWell& W,
                    double sigma_frac) {
  const Grid& g = u.grid;
  if (!u.grid.same_layout(w.grid)) throw std::invalid_argument("modify: grid mismatch");
  if (!(delta > 0.0)) throw std::invalid_argument("modify: delta must be positive");
  if (delta < 4.0 * g.max_spacing())
    throw std::invalid_argument("modify: delta must span several grid cells");

  ModifyReport rep;
  Mask all = mask_all(g);
  std::vector<double> dD = distance_to(g, mask_complement(D));
  Mask D_delta(D.size(), 0);
  for (std::size_t i = 0; i < D.size(); ++i)
    D_delta[i] = (D[i] && dD[i] > delta) ? 1 : 0;
  Mask offDdelta = mask_complement(D_delta);

  // energy budget and shell counts
  double Cu = total_energy(u, D, J, W, eps).total;
  double Cw = total_energy(w, offDdelta, J, W, eps).total;
  double C = Cu + Cw;
  rep.rhs = C;
  rep.sigma = sigma_frac * std::max(C, 1e-300);
  rep.M_raw = std::max(static_cast<int>(std::ceil(C / rep.sigma)), 8);
  int m_cap = static_cast<int>(std::floor(delta / (4.0 * eps)));
  rep.M = std::clamp(rep.M_raw, 1, std::max(1, m_cap));
  rep.m_capped = rep.M < rep.M_raw;
  double dtil = delta / rep.M;

  // macro shell selection: the shell with the least kinetic interaction
  int best_j = 0;
  double best_val = kInf;
  for (int j = 0; j < rep.M; ++j) {
    Mask shell(D.size(), 0);
    long cnt = 0;
    for (std::size_t i = 0; i < D.size(); ++i) {
      if (D[i] && dD[i] > j * dtil && dD[i] <= (j + 1) * dtil) {
        shell[i] = 1;
        ++cnt;
      }
    }
    if (cnt == 0) continue;
    double val = kinetic_direct(u, shell, D, J, eps) +
                 kinetic_direct(w, shell, offDdelta, J, eps);
    if (val < best_val) {
      best_val = val;
      best_j = j;
    }
  }
  rep.macro_index = best_j;

  Mask Dt(D.size(), 0);
  for (std::size_t i = 0; i < D.size(); ++i)
    Dt[i] = (D[i] && dD[i] > best_j * dtil) ? 1 : 0;
  std::vector<double> dDt = distance_to(g, mask_complement(Dt));

  rep.K = static_cast<int>(std::floor(dtil / (2.0 * eps)));
  if (rep.K < 1)
    throw std::runtime_error("modify: no room for an eps shell (K = 0)");

  // micro shell selection: tail-weighted mismatch, budget sigma * eps
  auto omega1_of = [&](double t) { return tail_moment(J, t).value; };
  double om1 = omega1_of(1.0);
  int best_i = 0;
  double best_disc = kInf;
  for (int i = 0; i < rep.K; ++i) {
    Accumulator disc;
    for (std::size_t c = 0; c < Dt.size(); ++c) {
      if (!Dt[c]) continue;
      double d = dDt[c];
      if (d <= i * eps || d > dtil) continue;  // shells live inside the macro band
      double du = std::abs(u.values[c] - w.values[c]);
      if (du == 0.0) continue;
      if (d <= (i + 1) * eps) {
        disc.add(du * om1);  // the ramp shell itself
      } else {
        double di = d - i * eps;  // distance to the shell's inner contour
        disc.add(du * omega1_of(eps / di) * (eps / di));
      }
    }
    double val = disc.value() * g.cell_volume();
    if (val < best_disc) {
      best_disc = val;
      best_i = i;
    }
  }
  rep.micro_index = best_i;
  rep.best_discrepancy = best_disc;
  rep.budget = rep.sigma * eps;
  rep.budget_ok = best_disc <= rep.budget;

  // partition and glue
  Mask P(D.size(), 0), Q(D.size(), 0), R(D.size(), 0), S(D.size(), 0);
  for (std::size_t i = 0; i < D.size(); ++i) {
    double d = Dt[i] ? dDt[i] : 0.0;
    if (Dt[i] && d > dtil) P[i] = 1;
    else if (Dt[i] && d > (best_i + 1) * eps) Q[i] = 1;
    else if (Dt[i] && d > best_i * eps) R[i] = 1;
    else S[i] = 1;
  }
  CutoffProfile cutoff = build_cutoff(g, P, Q, R, S, eps);
  rep.v = glue(u, w, cutoff);

  rep.lhs = total_energy(rep.v, all, J, W, eps).total;
  rep.slack = rep.lhs - rep.rhs;
  Mask band = mask_minus(D, D_delta);
  rep.mismatch_l1 = lp_distance(u, w, 1, &band);
  return rep;
}

// ---- polyhedral recovery ------------------------------------------------------------

namespace {

// Rectangle (prism) around the shrunken facet: length trimmed by end_margin
// at both ends, half-width rho/2 across the facet plane.
Mask prism_mask(const Grid& g, const Facet& f, double end_margin, double rho) {
  Vec tangent = f.b - f.a;
  double len = norm(tangent);
  tangent = (1.0 / len) * tangent;
  Vec nrm = f.normal;
  Mask m(static_cast<std::size_t>(g.ncells()), 0);
  for (long i = 0; i < g.ncells(); ++i) {
    Vec x = g.center(i) - f.a;
    double s = dot(x, tangent);
    double t = dot(x, nrm);
    if (s > end_margin && s < len - end_margin && std::abs(t) < rho / 2.0)
      m[static_cast<std::size_t>(i)] = 1;
  }
  return m;
}

Field facet_profile_field(const Grid& g, const Facet& f, const Profile& gamma,
                          double eps) {
  Field u(g, 0.0);
  for (long i = 0; i < g.ncells(); ++i) {
    double s = dot(g.center(i) - f.a, f.normal) / eps;
    double v;
    if (s <= -gamma.half_length) v = gamma.lo_tail;
    else if (s >= gamma.half_length) v = gamma.hi_tail;
    else {
      double t = (s - gamma.t(0)) / gamma.dt();
      int j = std::clamp(static_cast<int>(std::floor(t)), 0, gamma.size() - 2);
      double frac = std::clamp(t - j, 0.0, 1.0);
      v = gamma.samples[static_cast<std::size_t>(j)] * (1.0 - frac) +
          gamma.samples[static_cast<std::size_t>(j + 1)] * frac;
    }
    u[i] = v;
  }
  return u;
}

}  // namespace

RecoveryRun recovery_polyhedral(const PolyhedralInterface& sigma,
                                const EpsilonSchedule& sched, const Kernel& J,
                                const DoubleWell& W, double sigma_frac,
                                double tolerance_factor,
                                const CellOptions& cell_opt) {
  sched.validate();
  if (sigma.dim != 2 || sigma.topology != PolyhedralInterface::Topology::Polygon)
    throw std::invalid_argument("recovery_polyhedral: need a 2D polygon interface");

  RecoveryRun run;
  run.interface = sigma;
  run.tolerance_factor = tolerance_factor;
  double facet_sum = limit_energy(sigma, J, W, cell_opt);
  run.target = facet_sum * (1.0 + sigma_frac);

  double min_len = kInf;
  for (const auto& f : sigma.facets) min_len = std::min(min_len, f.measure);

  for (double eps : sched.values) {
    Grid g = sched.grid2d(eps);
    Field sharp = sharp_field(sigma, g).field;
    Field mol = mollify(sharp, eps).field;

    double rho = std::min(12.0 * eps, std::min(0.4 * min_len, 0.2));
    double end_margin = rho / 2.0 + eps;
    double delta_glue = 2.5 * eps;

    // per-facet prisms must stay pairwise disjoint; near-parallel consecutive
    // facets make that impossible and are a construction failure
    std::vector<Mask> prisms;
    for (const auto& f : sigma.facets)
      prisms.push_back(prism_mask(g, f, end_margin, rho));
    for (std::size_t i = 0; i < prisms.size(); ++i)
      for (std::size_t j = i + 1; j < prisms.size(); ++j)
        if (!masks_disjoint(prisms[i], prisms[j]))
          throw std::runtime_error(
              "recovery_polyhedral: facet prisms " + std::to_string(i) + " and " +
              std::to_string(j) + " overlap (degenerate polygon geometry)");

    Field v = mol;
    for (std::size_t fi = 0; fi < sigma.facets.size(); ++fi) {
      const Facet& f = sigma.facets[fi];
      SurfaceTension psi_f = surface_tension(f.normal, J, W, cell_opt);
      Field uf = facet_profile_field(g, f, psi_f.profile, eps);
      // inner prism D: v keeps the facet profile on D_delta and the previous
      // field off D
      Mask D = inner_set(g, prisms[fi], eps);
      if (mask_count(D) == 0) continue;
      ModifyReport mr = modify(uf, v, D, delta_glue, eps, J, W, sigma_frac);
      v = std::move(mr.v);
    }
    EnergyBreakdown e = total_energy(v, mask_all(g), J, W, eps);
    run.steps.push_back(measure_step(v, sharp, eps, e));
    if (eps == sched.values.back()) run.final_field = v;
  }
  run.limsup_ok = run.steps.back().energy.total <= run.target * tolerance_factor;
  return run;
}

// ---- skeleton estimate --------------------------------------------------------------

SkeletonPoint skeleton_estimate(const PolyhedralInterface& sigma, double delta,
                                double eps, const Kernel& J, double cells_per_eps) {
  if (!(eps < delta)) throw std::invalid_argument("skeleton_estimate: need eps < delta");
  EpsilonSchedule tmp;
  tmp.values = {eps};
  tmp.cells_per_eps = cells_per_eps;
  Grid g = tmp.grid2d(eps);
  Field sharp = sharp_field(sigma, g).field;
  Field mol = mollify(sharp, eps).field;
  Mask tube(static_cast<std::size_t>(g.ncells()), 0);
  for (long i = 0; i < g.ncells(); ++i) {
    Vec c = g.center(i);
    for (const auto& vtx : sigma.skeleton) {
      if (norm(c - vtx) < delta) {
        tube[static_cast<std::size_t>(i)] = 1;
        break;
      }
    }
  }
  SkeletonPoint pt;
  pt.delta = delta;
  pt.eps = eps;
  pt.vertex_count = sigma.skeleton_count();
  pt.lhs = kinetic_direct(mol, tube, tube, J, eps);
  pt.C_fit = pt.lhs / (delta * std::max(pt.vertex_count, 1.0));
  return pt;
}

SkeletonSweep skeleton_sweep(const PolyhedralInterface& sigma,
                             const std::vector<double>& deltas,
                             double eps_over_delta, const Kernel& J,
                             double cells_per_eps) {
  SkeletonSweep sw;
  std::vector<double> xs, ys;
  for (double d : deltas) {
    SkeletonPoint p = skeleton_estimate(sigma, d, d * eps_over_delta, J, cells_per_eps);
    sw.points.push_back(p);
    xs.push_back(d);
    ys.push_back(p.lhs);
  }
  sw.loglog_slope = loglog_slope(xs, ys);
  Accumulator cf;
  for (const auto& p : sw.points) cf.add(p.C_fit);
  sw.C_fit = cf.value() / static_cast<double>(sw.points.size());
  return sw;
}

std::string SkeletonSweep::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "delta,eps,lhs,vertices,C_fit\n";
  for (const auto& p : points)
    os << p.delta << "," << p.eps << "," << p.lhs << "," << p.vertex_count << ","
       << p.C_fit << "\n";
  return os.str();
}

// ---- liminf studies -----------------------------------------------------------------

namespace {

struct PinnedProblem {
  Grid grid;
  Mask pinned;           // cells with fixed values
  std::vector<double> pin_values;
};

double pinned_descent(Field& u, const PinnedProblem& prob, const Kernel& J,
                      const DoubleWell& W, double eps, int max_iter, int* iters,
                      bool* converged) {
  const Grid& g = prob.grid;
  Mask all = mask_all(g);
  auto apply_pins = [&](Field& f) {
    for (std::size_t i = 0; i < prob.pinned.size(); ++i)
      if (prob.pinned[i]) f.values[i] = prob.pin_values[i];
  };
  apply_pins(u);
  u.clamp_unit();
  auto energy_of = [&](const Field& f) {
    return kinetic_direct(f, all, all, J, eps) + potential_energy(f, all, W, eps);
  };
  double energy = energy_of(u);
  const double cv = g.cell_volume();
  double step = eps;  // natural scale of the stiffness
  int it = 0;
  int stall = 0;
  double last_marker = energy;
  for (; it < max_iter; ++it) {
    Field grad = kinetic_gradient(u, J, eps);
    for (std::size_t i = 0; i < grad.values.size(); ++i)
      grad.values[i] += cv / eps * W.deriv(u.values[i]);
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Field cand = u;
      for (std::size_t i = 0; i < cand.values.size(); ++i) {
        if (prob.pinned[i]) continue;
        cand.values[i] = std::clamp(cand.values[i] - step * grad.values[i], -1.0, 1.0);
      }
      double e2 = energy_of(cand);
      if (e2 < energy) {
        u = std::move(cand);
        energy = e2;
        step *= 1.4;
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-16) break;
    }
    if (!accepted) {
      if (converged) *converged = true;
      break;
    }
    if (it % 50 == 49) {
      if (last_marker - energy < 1e-9 * std::max(std::abs(energy), 1e-30)) {
        if (converged) *converged = true;
        break;
      }
      last_marker = energy;
    }
  }
  if (iters) *iters = it;
  if (converged && it == max_iter) *converged = false;
  return energy;
}

}  // namespace

LiminfReport liminf_study_1d(const EpsilonSchedule& sched, const Kernel& J,
                             const DoubleWell& W, double tol, int n_inits,
                             std::uint64_t seed, const CellOptions& cell_opt) {
  sched.validate();
  LiminfReport rep;
  rep.tol = tol;
  rep.target = surface_tension(vec1(1.0), J, W, cell_opt).value;

  for (double eps : sched.values) {
    Grid g = sched.grid1d(eps, 1.0, Boundary::Boxed);
    PinnedProblem prob;
    prob.grid = g;
    prob.pinned.assign(static_cast<std::size_t>(g.ncells()), 0);
    prob.pin_values.assign(static_cast<std::size_t>(g.ncells()), 0.0);
    for (long i = 0; i < g.ncells(); ++i) {
      double x = g.center(i)[0];
      if (x < 2.0 * eps) {
        prob.pinned[static_cast<std::size_t>(i)] = 1;
        prob.pin_values[static_cast<std::size_t>(i)] = -1.0;
      } else if (x > 1.0 - 2.0 * eps) {
        prob.pinned[static_cast<std::size_t>(i)] = 1;
        prob.pin_values[static_cast<std::size_t>(i)] = 1.0;
      }
    }

    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(eps * 1e9)));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double best = kInf;
    int best_iters = 0;
    bool best_conv = false;
    for (int init = 0; init < n_inits; ++init) {
      Field u(g, 0.0);
      for (long i = 0; i < g.ncells(); ++i) {
        double x = g.center(i)[0];
        switch (init) {
          case 0: u[i] = std::tanh((x - 0.5) / eps); break;
          case 1: u[i] = x > 0.5 ? 1.0 : -1.0; break;
          case 2: u[i] = 2.0 * x - 1.0; break;
          default: u[i] = uni(rng); break;
        }
      }
      int iters = 0;
      bool conv = false;
      double e = pinned_descent(u, prob, J, W, eps, 4000, &iters, &conv);
      if (e < best) {
        best = e;
        best_iters = iters;
        best_conv = conv;
      }
    }
    rep.steps.push_back({eps, best, best_iters, best_conv});
  }

  rep.final_ok =
      std::abs(rep.steps.back().min_energy - rep.target) <= tol * rep.target;
  rep.lower_ok = rep.steps.back().min_energy >= rep.target * (1.0 - tol);
  rep.trend_ok = true;
  for (std::size_t i = 1; i < rep.steps.size(); ++i) {
    double prev = std::abs(rep.steps[i - 1].min_energy - rep.target);
    double cur = std::abs(rep.steps[i].min_energy - rep.target);
    if (cur > prev * 1.05 + 1e-12) rep.trend_ok = false;  // small slack for noise
  }
  return rep;
}

LiminfReport liminf_study_2d(double eps, const Kernel& J, const DoubleWell& W,
                             double height, double tol, std::uint64_t seed,
                             const CellOptions& cell_opt) {
  LiminfReport rep;
  rep.tol = tol;
  rep.target = surface_tension(vec2(1.0, 0.0), J, W, cell_opt).value * height;

  EpsilonSchedule tmp;
  tmp.values = {eps};
  Grid g = tmp.grid2d(eps, 1.0, height, Boundary::Boxed);
  PinnedProblem prob;
  prob.grid = g;
  prob.pinned.assign(static_cast<std::size_t>(g.ncells()), 0);
  prob.pin_values.assign(static_cast<std::size_t>(g.ncells()), 0.0);
  for (long i = 0; i < g.ncells(); ++i) {
    double x = g.center(i)[0];
    if (x < 2.0 * eps) {
      prob.pinned[static_cast<std::size_t>(i)] = 1;
      prob.pin_values[static_cast<std::size_t>(i)] = -1.0;
    } else if (x > 1.0 - 2.0 * eps) {
      prob.pinned[static_cast<std::size_t>(i)] = 1;
      prob.pin_values[static_cast<std::size_t>(i)] = 1.0;
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double best = kInf;
  int best_iters = 0;
  bool best_conv = false;
  for (int init = 0; init < 3; ++init) {
    Field u(g, 0.0);
    for (long i = 0; i < g.ncells(); ++i) {
      double x = g.center(i)[0];
      if (init == 0) u[i] = std::tanh((x - 0.5) / eps);
      else if (init == 1) u[i] = x > 0.5 ? 1.0 : -1.0;
      else u[i] = uni(rng);
    }
    int iters = 0;
    bool conv = false;
    double e = pinned_descent(u, prob, J, W, eps, 2000, &iters, &conv);
    if (e < best) {
      best = e;
      best_iters = iters;
      best_conv = conv;
    }
  }
  rep.steps.push_back({eps, best, best_iters, best_conv});
  rep.final_ok = std::abs(best - rep.target) <= tol * rep.target;
  rep.lower_ok = best >= rep.target * (1.0 - tol);
  rep.trend_ok = true;
  return rep;
}

std::string LiminfReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "eps,min_energy,target,iterations,converged\n";
  for (const auto& s : steps)
    os << s.eps << "," << s.min_energy << "," << target << "," << s.iterations
       << "," << (s.converged ? 1 : 0) << "\n";
  return os.str();
}

// ---- compactness ---------------------------------------------------------------------

CompactnessReport compactness_diagnostic(const std::vector<Field>& fields,
                                         const std::vector<double>& eps) {
  CompactnessReport rep;
  rep.eps = eps;
  for (const auto& f : fields) {
    rep.transition01.push_back(transition_measure(f, 0.1));
    rep.transition05.push_back(transition_measure(f, 0.5));
  }
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      if (fields[i].grid.same_layout(fields[j].grid))
        rep.pairwise_l1.push_back(lp_distance(fields[i], fields[j], 1));
      else
        rep.pairwise_l1.push_back(-1.0);  // incomparable resolutions
    }
  if (fields.size() >= 3 && eps.size() == fields.size())
    rep.loglog_slope01 = loglog_slope(eps, rep.transition01);
  return rep;
}

std::string CompactnessReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "eps,transition01,transition05\n";
  for (std::size_t i = 0; i < eps.size(); ++i)
    os << eps[i] << "," << transition01[i] << "," << transition05[i] << "\n";
  return os.str();
}

}  // namespace nlphase
