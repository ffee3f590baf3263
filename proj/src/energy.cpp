#include "nlphase/energy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nlphase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact integral of C r^p over [a, b] (same helper as in kernels.cpp; small
// enough to duplicate rather than export).
double power_piece(double C, double p, double a, double b) {
  if (C == 0.0 || a >= b) return 0.0;
  if (p == -1.0) return (a <= 0.0 || std::isinf(b)) ? kInf : C * std::log(b / a);
  double q = p + 1.0;
  double hi = std::isinf(b) ? (q < 0.0 ? 0.0 : kInf) : std::pow(b, q);
  double lo = a == 0.0 ? (q > 0.0 ? 0.0 : kInf) : std::pow(a, q);
  return C * (hi - lo) / q;
}

struct RadialProfile {
  double coef;   // radial value = coef * r^p on (inner, outer]
  double p;
  double inner;
  double outer;
};

RadialProfile radial_profile(const Kernel& J) {
  const KernelSpec& sp = J.spec();
  double sc = J.scale_factor();
  RadialProfile rp{};
  rp.inner = J.inner_radius();
  rp.outer = J.support_radius();
  if (sp.kind == KernelKind::Indicator) {
    rp.coef = std::pow(sc, -sp.dim);
    rp.p = 0.0;
  } else {
    rp.coef = std::pow(sc, 2.0 * sp.s);
    rp.p = -(sp.dim + 2.0 * sp.s);
  }
  return rp;
}

// Kernel mass over a 1D interval [a, b] on the positive axis (exact for the
// built-in radial kinds).
double interval_mass_1d(const Kernel& J, double a, double b) {
  RadialProfile rp = radial_profile(J);
  double lo = std::max(a, rp.inner);
  double hi = std::min(b, rp.outer);
  if (!(hi > lo)) return 0.0;
  return power_piece(rp.coef, rp.p, lo, hi);
}

double rect_min_dist(const Vec& lo, const Vec& hi) {
  double dx = std::max({lo[0], -hi[0], 0.0});
  double dy = std::max({lo[1], -hi[1], 0.0});
  return std::hypot(dx, dy);
}

double rect_max_dist(const Vec& lo, const Vec& hi) {
  double dx = std::max(std::abs(lo[0]), std::abs(hi[0]));
  double dy = std::max(std::abs(lo[1]), std::abs(hi[1]));
  return std::hypot(dx, dy);
}

// Kernel mass over an offset cell (2D). Exact shortcuts for cells fully
// inside/outside the radial structure; adaptive rectangle quadrature when the
// cell straddles the truncation or support circle (or the kernel is
// anisotropic).
double cell_mass_2d(const Kernel& J, Vec lo, Vec hi) {
  double dmin = rect_min_dist(lo, hi);
  double dmax = rect_max_dist(lo, hi);
  double inner = J.inner_radius();
  double sup = J.support_radius();
  if (dmin >= sup || dmax <= inner) return 0.0;
  double area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
  if (J.kind() == KernelKind::Indicator && dmax <= sup && dmin >= inner)
    return area * std::pow(J.scale_factor(), -2.0);
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-9;
  opt.max_evals = 40000;
  return quad::integrate2(
             [&](double x, double y) { return J(vec2(x, y)); }, lo[0], hi[0],
             lo[1], hi[1], opt)
      .value;
}

// Residual kernel mass beyond Euclidean radius R (evaluated coordinates).
double tail_mass_beyond(const Kernel& J, double R) {
  RadialProfile rp = radial_profile(J);
  double angular = J.dim() == 1 ? 2.0 : 2.0 * kPi;
  if (J.kind() == KernelKind::AnisoFractional) {
    const auto& radii = J.spec().ball.samples();
    Accumulator acc;
    for (double r : radii) acc.add(std::pow(r, J.dim() + 2.0 * J.spec().s));
    angular = acc.value() / static_cast<double>(radii.size()) * 2.0 * kPi;
  }
  double lo = std::max(R, rp.inner);
  return angular * power_piece(rp.coef, rp.p + J.dim() - 1, lo, rp.outer);
}

std::mutex g_table_mutex;
std::map<std::string, std::shared_ptr<const OffsetTable>> g_tables;

std::shared_ptr<const OffsetTable> build_table(const Kernel& J, double eps,
                                               const Grid& g) {
  auto tab = std::make_shared<OffsetTable>();
  tab->grid = g;
  tab->eps = eps;
  Kernel Je = scaled(J, eps);
  const int nx = g.res[0], ny = g.dim == 2 ? g.res[1] : 1;
  const double hx = g.spacing(0), hy = g.dim == 2 ? g.spacing(1) : 1.0;
  const double cv = g.cell_volume();
  const bool periodic = g.boundary == Boundary::Periodic;
  const double sup = Je.support_radius();
  const double far_cell = 16.0 * g.max_spacing();  // midpoint rule beyond this

  auto one_cell = [&](double cx, double cy) -> double {
    if (g.dim == 1) {
      double a = cx - 0.5 * hx, b = cx + 0.5 * hx;
      if (b <= 0.0) {  // evenness: flip to the positive side
        double t = -a;
        a = -b;
        b = t;
      }
      return interval_mass_1d(Je, a, b);
    }
    Vec lo = vec2(cx - 0.5 * hx, cy - 0.5 * hy);
    Vec hi = vec2(cx + 0.5 * hx, cy + 0.5 * hy);
    double dmin = rect_min_dist(lo, hi);
    if (dmin >= sup) return 0.0;
    if (dmin >= far_cell) return Je(vec2(cx, cy)) * cv;
    return cell_mass_2d(Je, lo, hi);
  };

  if (periodic) {
    tab->w.assign(static_cast<std::size_t>(g.ncells()), 0.0);
    const int Mx = g.dim == 1 ? 32 : 2;
    const int My = g.dim == 2 ? 2 : 0;
    const double Lx = g.extent[0], Ly = g.extent[1];
    // symmetric fold window: include an image iff its center lies within the
    // box |c| <= (M + 1/2) L per axis, so the set of folded images of class k
    // is exactly the negation of the set for class n-k (weights stay even)
    const double Rx = (Mx + 0.5) * Lx, Ry = (My + 0.5) * Ly;
    for (int kj = 0; kj < ny; ++kj) {
      for (int ki = 0; ki < nx; ++ki) {
        if (ki == 0 && kj == 0) continue;
        Accumulator acc;
        const int mj_span = g.dim == 2 ? My + 1 : 0;
        for (int mj = -mj_span; mj <= mj_span; ++mj) {
          for (int mi = -Mx - 1; mi <= Mx + 1; ++mi) {
            double cx = (ki + static_cast<double>(mi) * nx) * hx;
            double cy = g.dim == 2 ? (kj + static_cast<double>(mj) * ny) * hy : 0.0;
            if (std::abs(cx) > Rx || (g.dim == 2 && std::abs(cy) > Ry)) continue;
            acc.add(one_cell(cx, cy));
          }
        }
        tab->w[static_cast<std::size_t>(g.index(ki, kj))] = acc.value() / cv;
      }
    }
    // fold horizon and equidistributed remainder for unbounded kernels
    double Rm = g.dim == 1 ? Rx : std::min(Rx, Ry);
    tab->tail_mass = std::isfinite(sup) && sup <= Rm ? 0.0 : tail_mass_beyond(Je, Rm);
    if (tab->tail_mass > 0.0) {
      double add = tab->tail_mass / (static_cast<double>(g.ncells()) * cv);
      for (std::size_t i = 1; i < tab->w.size(); ++i) tab->w[i] += add;
    }
  } else {
    const int tw = 2 * nx - 1, th = g.dim == 2 ? 2 * ny - 1 : 1;
    tab->w.assign(static_cast<std::size_t>(tw) * th, 0.0);
    for (int kj = -(th / 2); kj <= th / 2; ++kj) {
      for (int ki = -(nx - 1); ki <= nx - 1; ++ki) {
        if (ki == 0 && kj == 0) continue;
        double m = one_cell(ki * hx, g.dim == 2 ? kj * hy : 0.0);
        tab->w[static_cast<std::size_t>((kj + th / 2) * tw + (ki + nx - 1))] = m / cv;
      }
    }
    tab->tail_mass = 0.0;  // boxed pairs are bounded by the domain
  }

  // weight sum and the pruning radius of the nonzero block
  Accumulator ws;
  int prx = 0, pry = 0;
  if (periodic) {
    for (int kj = 0; kj < ny; ++kj)
      for (int ki = 0; ki < nx; ++ki) {
        double v = tab->w[static_cast<std::size_t>(g.index(ki, kj))];
        if (v != 0.0) {
          ws.add(v);
          int ai = std::min(ki, nx - ki);  // wrapped magnitude
          int aj = std::min(kj, ny - kj);
          prx = std::max(prx, ai);
          pry = std::max(pry, aj);
        }
      }
  } else {
    const int tw = 2 * nx - 1, th = g.dim == 2 ? 2 * ny - 1 : 1;
    for (int kj = -(th / 2); kj <= th / 2; ++kj)
      for (int ki = -(nx - 1); ki <= nx - 1; ++ki) {
        double v = tab->w[static_cast<std::size_t>((kj + th / 2) * tw + (ki + nx - 1))];
        if (v != 0.0) {
          ws.add(v);
          prx = std::max(prx, std::abs(ki));
          pry = std::max(pry, std::abs(kj));
        }
      }
  }
  tab->wsum = ws.value();
  tab->prune_rx = prx;
  tab->prune_ry = pry;
  return tab;
}

}  // namespace

double OffsetTable::weight(int ki, int kj) const {
  return w[static_cast<std::size_t>(weight_index(ki, kj))];
}

long OffsetTable::weight_index(int ki, int kj) const {
  const int nx = grid.res[0], ny = grid.dim == 2 ? grid.res[1] : 1;
  if (periodic()) {
    int i = (ki % nx + nx) % nx;
    int j = grid.dim == 2 ? (kj % ny + ny) % ny : 0;
    return grid.index(i, j);
  }
  const int tw = 2 * nx - 1, th = grid.dim == 2 ? 2 * ny - 1 : 1;
  return static_cast<long>(kj + th / 2) * tw + (ki + nx - 1);
}

std::shared_ptr<const OffsetTable> offset_table(const Kernel& J, double eps,
                                                const Grid& g) {
  std::ostringstream key;
  key << J.fingerprint() << " | eps=" << eps << " | " << g.fingerprint();
  {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    auto it = g_tables.find(key.str());
    if (it != g_tables.end()) return it->second;
  }
  auto tab = build_table(J, eps, g);
  std::lock_guard<std::mutex> lock(g_table_mutex);
  auto [it, inserted] = g_tables.emplace(key.str(), tab);
  return it->second;  // last-write-wins on a race; tables are identical
}

// ---- kinetic evaluators -------------------------------------------------------

double kinetic_direct(const Field& u, const Mask& A, const Mask& B,
                      const Kernel& J, double eps) {
  const Grid& g = u.grid;
  auto tab = offset_table(J, eps, g);
  const int nx = g.res[0], ny = g.dim == 2 ? g.res[1] : 1;
  const bool periodic = tab->periodic();

  std::vector<long> acells, bcells;
  for (long i = 0; i < g.ncells(); ++i) {
    if (A[static_cast<std::size_t>(i)]) acells.push_back(i);
    if (B[static_cast<std::size_t>(i)]) bcells.push_back(i);
  }
  // one offset representative per periodic class: drop the negative twin of
  // the self-inverse class n/2 on even grids
  auto skip_twin = [&](int ki, int kj) {
    if (!periodic) return false;
    if (nx % 2 == 0 && ki == -nx / 2) return true;
    if (g.dim == 2 && ny % 2 == 0 && kj == -ny / 2) return true;
    return false;
  };
  // choose pair iteration or offset iteration, whichever touches fewer terms
  const long noff = (2L * tab->prune_rx + 1) * (2L * tab->prune_ry + 1);
  Accumulator acc;
  if (!bcells.empty() && noff < static_cast<long>(bcells.size())) {
    for (long ia : acells) {
      int xi = static_cast<int>(ia % nx), xj = static_cast<int>(ia / nx);
      double ux = u[ia];
      for (int kj = -tab->prune_ry; kj <= tab->prune_ry; ++kj) {
        for (int ki = -tab->prune_rx; ki <= tab->prune_rx; ++ki) {
          if (ki == 0 && kj == 0) continue;
          if (skip_twin(ki, kj)) continue;
          int yi = xi + ki, yj = xj + kj;
          if (periodic) {
            yi = (yi % nx + nx) % nx;
            yj = ny > 1 ? (yj % ny + ny) % ny : 0;
          } else if (yi < 0 || yi >= nx || yj < 0 || yj >= ny) {
            continue;
          }
          long ib = g.index(yi, yj);
          if (!B[static_cast<std::size_t>(ib)]) continue;
          double d = u[ib] - ux;
          acc.add(tab->weight(ki, kj) * d * d);
        }
      }
    }
  } else {
    for (long ia : acells) {
      int xi = static_cast<int>(ia % nx), xj = static_cast<int>(ia / nx);
      double ux = u[ia];
      for (long ib : bcells) {
        if (ib == ia) continue;
        int yi = static_cast<int>(ib % nx), yj = static_cast<int>(ib / nx);
        double d = u[ib] - ux;
        acc.add(tab->weight(yi - xi, yj - xj) * d * d);
      }
    }
  }
  double cv = g.cell_volume();
  return acc.value() * cv * cv / (4.0 * eps);
}

namespace {

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

}  // namespace

std::vector<double> circular_convolve(const Grid& g, const std::vector<double>& w,
                                      const std::vector<double>& u) {
  if (g.boundary != Boundary::Periodic)
    throw std::invalid_argument("circular_convolve: periodic grids only");
  const int nx = g.res[0], ny = g.dim == 2 ? g.res[1] : 1;
  const long n = g.ncells();
  const long nc = static_cast<long>(ny) * (nx / 2 + 1);
  std::vector<double> a(u), b(w), out(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> fa(static_cast<std::size_t>(nc)),
      fb(static_cast<std::size_t>(nc));
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_plan pa = fftw_plan_dft_r2c_2d(ny, nx, a.data(),
                                        reinterpret_cast<fftw_complex*>(fa.data()),
                                        FFTW_ESTIMATE);
    fftw_plan pb = fftw_plan_dft_r2c_2d(ny, nx, b.data(),
                                        reinterpret_cast<fftw_complex*>(fb.data()),
                                        FFTW_ESTIMATE);
    fftw_execute(pa);
    fftw_execute(pb);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    for (long i = 0; i < nc; ++i)
      fa[static_cast<std::size_t>(i)] *= fb[static_cast<std::size_t>(i)];
    fftw_plan pc = fftw_plan_dft_c2r_2d(ny, nx,
                                        reinterpret_cast<fftw_complex*>(fa.data()),
                                        out.data(), FFTW_ESTIMATE);
    fftw_execute(pc);
    fftw_destroy_plan(pc);
  }
  double inv = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= inv;
  return out;
}

double kinetic_fast(const Field& u, const Kernel& J, double eps) {
  const Grid& g = u.grid;
  if (g.boundary != Boundary::Periodic)
    throw std::invalid_argument("kinetic_fast: periodic grids only");
  auto tab = offset_table(J, eps, g);
  // sum_x sum_k w_k (u_{x+k} - u_x)^2 = 2 wsum |u|^2 - 2 <u, w (*) u>
  std::vector<double> conv = circular_convolve(g, tab->w, u.values);
  Accumulator qa, qb;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    qa.add(u.values[i] * u.values[i]);
    qb.add(u.values[i] * conv[i]);
  }
  double s = 2.0 * tab->wsum * qa.value() - 2.0 * qb.value();
  double cv = g.cell_volume();
  return s * cv * cv / (4.0 * eps);
}

double potential_energy(const Field& u, const Mask& A, const DoubleWell& W,
                        double eps) {
  Accumulator acc;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    if (A[i]) acc.add(W.eval(u.values[i]));
  return acc.value() * u.grid.cell_volume() / eps;
}

EnergyBreakdown total_energy(const Field& u, const Mask& A, const Kernel& J,
                             const DoubleWell& W, double eps) {
  EnergyBreakdown out;
  out.epsilon = eps;
  out.rho = J.spec().rho;
  bool full = mask_count(A) == u.grid.ncells();
  if (u.grid.boundary == Boundary::Periodic && full) {
    out.kinetic = kinetic_fast(u, J, eps);
    out.path = "fast";
  } else {
    out.kinetic = kinetic_direct(u, A, A, J, eps);
    out.path = "direct";
  }
  auto tab = offset_table(J, eps, u.grid);
  out.tail_bound = tab->tail_mass * mask_volume(u.grid, A) / eps;
  out.potential = potential_energy(u, A, W, eps);
  out.total = out.kinetic + out.potential;
  return out;
}

EnergyBreakdown truncated_energy(const Field& u, const Mask& A, const Kernel& J,
                                 double rho, const DoubleWell& W, double eps) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("truncated_energy: rho must lie in (0,1)");
  EnergyBreakdown out = total_energy(u, A, truncated(J, rho), W, eps);
  out.rho = rho;
  return out;
}

std::string EnergyBreakdown::to_json() const {
  nlohmann::json j;
  j["kinetic"] = kinetic;
  j["potential"] = potential;
  j["total"] = total;
  j["path"] = path;
  j["tail_bound"] = tail_bound;
  j["epsilon"] = epsilon;
  j["rho"] = rho;
  return j.dump(2);
}

// ---- bound lemmas ---------------------------------------------------------------

namespace {

// Arc length of the circle of radius r centered at the origin inside the
// rectangle [lo, hi] (origin may lie anywhere).
double circle_rect_arclength(double r, const Vec& lo, const Vec& hi) {
  if (r <= 0.0) return 0.0;
  // angular intervals violating each of the 4 half-plane constraints are
  // subtracted from the full circle by sampling-free interval arithmetic
  struct Arc {
    double a, b;  // forbidden angular interval(s), may wrap
  };
  std::vector<Arc> forbidden;
  auto add_forbidden = [&](double c, bool upper, bool is_x) {
    // constraint: coordinate <= c (upper) or >= c (lower)
    double q = c / r;
    if (is_x) {
      if (upper) {  // x <= c violated where cos(t) > q
        if (q >= 1.0) return;
        if (q <= -1.0) {
          forbidden.push_back({0.0, 2.0 * kPi});
          return;
        }
        double t = std::acos(q);
        forbidden.push_back({-t, t});
      } else {  // x >= c violated where cos(t) < q
        if (q <= -1.0) return;
        if (q >= 1.0) {
          forbidden.push_back({0.0, 2.0 * kPi});
          return;
        }
        double t = std::acos(q);
        forbidden.push_back({t, 2.0 * kPi - t});
      }
    } else {
      if (upper) {  // y <= c violated where sin(t) > q
        if (q >= 1.0) return;
        if (q <= -1.0) {
          forbidden.push_back({0.0, 2.0 * kPi});
          return;
        }
        double t = std::asin(q);
        forbidden.push_back({t, kPi - t});
      } else {  // y >= c violated where sin(t) < q
        if (q <= -1.0) return;
        if (q >= 1.0) {
          forbidden.push_back({0.0, 2.0 * kPi});
          return;
        }
        double t = std::asin(q);
        forbidden.push_back({kPi - t, 2.0 * kPi + t});
      }
    }
  };
  add_forbidden(hi[0], true, true);
  add_forbidden(lo[0], false, true);
  add_forbidden(hi[1], true, false);
  add_forbidden(lo[1], false, false);
  if (forbidden.empty()) return 2.0 * kPi * r;
  // merge forbidden intervals on the circle
  std::vector<std::pair<double, double>> segs;
  for (const auto& f : forbidden) {
    double a = f.a, b = f.b;
    if (b - a >= 2.0 * kPi) return 0.0;
    a = std::fmod(std::fmod(a, 2.0 * kPi) + 2.0 * kPi, 2.0 * kPi);
    b = a + (f.b - f.a);
    if (b <= 2.0 * kPi) {
      segs.emplace_back(a, b);
    } else {
      segs.emplace_back(a, 2.0 * kPi);
      segs.emplace_back(0.0, b - 2.0 * kPi);
    }
  }
  std::sort(segs.begin(), segs.end());
  double covered = 0.0, cur_a = -1.0, cur_b = -1.0;
  for (const auto& s : segs) {
    if (cur_b < 0.0) {
      cur_a = s.first;
      cur_b = s.second;
    } else if (s.first <= cur_b) {
      cur_b = std::max(cur_b, s.second);
    } else {
      covered += cur_b - cur_a;
      cur_a = s.first;
      cur_b = s.second;
    }
  }
  if (cur_b >= 0.0) covered += cur_b - cur_a;
  double allowed = 2.0 * kPi - covered;
  return std::max(allowed, 0.0) * r;
}

}  // namespace

BoundCheck interior_bound(const Kernel& J, double eps, double a, double b,
                          int dim, Vec box_lo, Vec box_hi, Vec y) {
  if (!(b >= a * eps))
    throw std::invalid_argument("interior_bound: requires b >= a*eps");
  BoundCheck out;
  out.rhs = a * b * mixed_moment(J).value * eps;
  if (a == 0.0) {
    out.lhs = 0.0;
    out.holds = true;
    return out;
  }
  Kernel Je = scaled(J, eps);
  auto gfun = [&](double r) {
    double v = std::min(a * r, b);
    return v * v;
  };
  quad::Options opt;
  opt.rel_tol = 1e-8;
  opt.abs_tol = 1e-12;
  if (dim == 1) {
    auto f = [&](double r) { return Je.radial_value(r) * gfun(r); };
    double dplus = box_hi[0] - y[0];
    double dminus = y[0] - box_lo[0];
    if (dplus > 0.0 && dminus > 0.0) {  // y interior: graded toward 0 both ways
      out.lhs = quad::integrate_to_zero(f, dplus, opt).value +
                quad::integrate_to_zero(f, dminus, opt).value;
    } else if (dplus <= 0.0) {  // y right of the box
      out.lhs = quad::integrate(f, -dplus, dminus, opt).value;
    } else {  // y left of the box
      out.lhs = quad::integrate(f, -dminus, dplus, opt).value;
    }
  } else {
    Vec lo = box_lo - y, hi = box_hi - y;
    auto f = [&](double r) {
      return Je.radial_value(r) * gfun(r) * circle_rect_arclength(r, lo, hi);
    };
    double rmin = rect_min_dist(lo, hi);
    double rmax = rect_max_dist(lo, hi);
    double lhs = 0.0;
    double start = rmin;
    if (rmin == 0.0) {  // y inside: full circles up to the nearest edge
      double r0 = std::min(
          {std::abs(lo[0]), std::abs(hi[0]), std::abs(lo[1]), std::abs(hi[1])});
      if (r0 > 0.0) lhs += quad::integrate_to_zero(f, r0, opt).value;
      start = r0;
    }
    // split where the circle meets box edges or corners (integrand kinks)
    std::vector<double> cuts{start};
    for (double c : {std::abs(lo[0]), std::abs(hi[0]), std::abs(lo[1]), std::abs(hi[1]),
                     std::hypot(lo[0], lo[1]), std::hypot(lo[0], hi[1]),
                     std::hypot(hi[0], lo[1]), std::hypot(hi[0], hi[1])})
      if (c > start && c < rmax) cuts.push_back(c);
    cuts.push_back(rmax);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i])
        lhs += quad::integrate(f, cuts[i], cuts[i + 1], opt).value;
    out.lhs = lhs;
  }
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-12;
  return out;
}

BoundCheck separation_bound(const Field& u, const Mask& E, const Mask& F,
                            const Kernel& J, double eps, double delta) {
  const Grid& g = u.grid;
  double hx = g.spacing(0), hy = g.dim == 2 ? g.spacing(1) : 0.0;
  double celldiag = std::hypot(hx, hy);
  double dist = mask_distance(g, E, F);
  if (!(dist - celldiag >= delta))
    throw std::invalid_argument(
        "separation_bound: regions are closer than delta (cell-set distance " +
        std::to_string(dist - celldiag) + " < " + std::to_string(delta) + ")");
  BoundCheck out;
  out.lhs = kinetic_direct(u, E, F, J, eps);
  Accumulator l2;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    if (E[i] || F[i]) l2.add(u.values[i] * u.values[i]);
  double mass = l2.value() * g.cell_volume();
  out.rhs = tail_moment(J, eps / delta).value / (2.0 * delta) * mass;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-12;
  return out;
}

Field kinetic_gradient(const Field& u, const Kernel& J, double eps) {
  const Grid& g = u.grid;
  auto tab = offset_table(J, eps, g);
  const int nx = g.res[0], ny = g.dim == 2 ? g.res[1] : 1;
  const bool periodic = tab->periodic();
  Field grad(g, 0.0);
  const double cv = g.cell_volume();
  const double fac = cv * cv / eps;
  auto skip_twin = [&](int ki, int kj) {
    if (!periodic) return false;
    if (nx % 2 == 0 && ki == -nx / 2) return true;
    if (g.dim == 2 && ny % 2 == 0 && kj == -ny / 2) return true;
    return false;
  };
  for (int xj = 0; xj < ny; ++xj) {
    for (int xi = 0; xi < nx; ++xi) {
      long ix = g.index(xi, xj);
      double ux = u[ix];
      Accumulator acc;
      for (int kj = -tab->prune_ry; kj <= tab->prune_ry; ++kj) {
        for (int ki = -tab->prune_rx; ki <= tab->prune_rx; ++ki) {
          if (ki == 0 && kj == 0) continue;
          if (skip_twin(ki, kj)) continue;
          int yi = xi + ki, yj = xj + kj;
          if (periodic) {
            yi = (yi % nx + nx) % nx;
            yj = ny > 1 ? (yj % ny + ny) % ny : 0;
          } else if (yi < 0 || yi >= nx || yj < 0 || yj >= ny) {
            continue;
          }
          acc.add(tab->weight(ki, kj) * (ux - u[g.index(yi, yj)]));
        }
      }
      grad[ix] = fac * acc.value();
    }
  }
  return grad;
}

}  // namespace nlphase
