#include "nlphase/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace nlphase::quad {

namespace {

// Kronrod-15 abscissae on [0,1] side of the symmetric rule; odd indices are
// the embedded Gauss-7 nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEst {
  double value;
  double error;
};

PanelEst gk15(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double fsum = f(c - x) + f(c + x);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace

double Result::tolerance_for(const Options& o) const {
  return std::max(o.abs_tol, o.rel_tol * std::abs(value));
}

bool increments_diverge(const std::vector<double>& inc) {
  const int span = 5;
  if (static_cast<int>(inc.size()) <= span) return false;
  // Only the trailing window matters: transient early growth is fine.
  std::size_t k = inc.size() - 1;
  double late = std::abs(inc[k]);
  double early = std::abs(inc[k - span]);
  if (late == 0.0) return false;
  return late > 0.5 * early;
}

Result integrate(const Fn1& f, double a, double b, const Options& opt) {
  Result res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  std::priority_queue<Interval> heap;
  PanelEst first = gk15(f, a, b);
  res.evals = 15;
  heap.push({a, b, first.value, first.error});
  double total = first.value;
  double toterr = first.error;

  while (toterr > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
         res.evals + 30 <= opt.max_evals) {
    Interval top = heap.top();
    heap.pop();
    double m = 0.5 * (top.a + top.b);
    if (m <= top.a || m >= top.b) {  // no representable midpoint left
      heap.push(top);
      break;
    }
    PanelEst l = gk15(f, top.a, m);
    PanelEst r = gk15(f, m, top.b);
    res.evals += 30;
    total += l.value + r.value - top.value;
    toterr += l.error + r.error - top.error;
    heap.push({top.a, m, l.value, l.error});
    heap.push({m, top.b, r.value, r.error});
  }
  res.value = total;
  res.error = toterr;
  res.converged = toterr <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return res;
}

Result integrate_tail(const Fn1& f, double a, const Options& opt) {
  Result res;
  Options panel_opt = opt;
  panel_opt.max_evals = std::max(2000, opt.max_evals / 64);
  double width = std::max(1.0, std::abs(a));
  double lo = a;
  double total = 0.0;
  double err = 0.0;
  for (int level = 0; level < opt.max_levels; ++level) {
    double hi = lo + width;
    Result p = integrate(f, lo, hi, panel_opt);
    res.evals += p.evals;
    total += p.value;
    err += p.error;
    res.increments.push_back(std::abs(p.value));
    double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    // Geometric extrapolation of the remainder once increments contract.
    if (res.increments.size() >= 2) {
      double i1 = res.increments[res.increments.size() - 2];
      double i0 = res.increments.back();
      if (i0 == 0.0) {
        res.value = total;
        res.error = err;
        res.converged = true;
        return res;
      }
      double ratio = i0 / std::max(i1, 1e-300);
      if (ratio < 0.9) {
        double remainder = i0 * ratio / (1.0 - ratio);
        if (remainder < tol && i0 < tol) {
          res.value = total;
          res.error = err + remainder;
          res.converged = true;
          return res;
        }
      }
    }
    lo = hi;
    width *= 2.0;  // doubling horizons
  }
  res.value = total;
  res.error = err;
  res.divergent = increments_diverge(res.increments);
  res.converged = false;
  return res;
}

Result integrate_to_zero(const Fn1& f, double b, const Options& opt) {
  Result res;
  Options panel_opt = opt;
  panel_opt.max_evals = std::max(2000, opt.max_evals / 64);
  double hi = b;
  double total = 0.0;
  double err = 0.0;
  int levels = std::max(opt.max_levels, 200);
  for (int level = 0; level < levels; ++level) {
    double lo = hi * 0.5;
    Result p = integrate(f, lo, hi, panel_opt);
    res.evals += p.evals;
    total += p.value;
    err += p.error;
    res.increments.push_back(std::abs(p.value));
    double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (res.increments.size() >= 2) {
      double i1 = res.increments[res.increments.size() - 2];
      double i0 = res.increments.back();
      double ratio = i0 / std::max(i1, 1e-300);
      if (i0 == 0.0 || (ratio < 0.9 && i0 * ratio / (1.0 - ratio) < tol && i0 < tol)) {
        res.value = total;
        res.error = err + i0;
        res.converged = true;
        return res;
      }
    }
    hi = lo;
    if (hi < 1e-300) break;
  }
  res.value = total;
  res.error = err;
  res.divergent = increments_diverge(res.increments);
  res.converged = false;
  return res;
}

namespace {

struct Cell2 {
  double ax, bx, ay, by, value, error;
  bool operator<(const Cell2& o) const { return error < o.error; }
};

PanelEst gk15x15(const Fn2& f, double ax, double bx, double ay, double by, long& evals) {
  // Tensor Kronrod value with tensor Gauss comparison for the error estimate.
  const double cx = 0.5 * (ax + bx), hx = 0.5 * (bx - ax);
  const double cy = 0.5 * (ay + by), hy = 0.5 * (by - ay);
  double xs[15], wxk[15], wxg[15];
  double ys[15], wyk[15], wyg[15];
  for (int j = 0; j < 7; ++j) {
    int i1 = j, i2 = 14 - j;
    xs[i1] = cx - hx * kXgk[j];
    xs[i2] = cx + hx * kXgk[j];
    ys[i1] = cy - hy * kXgk[j];
    ys[i2] = cy + hy * kXgk[j];
    wxk[i1] = wxk[i2] = kWgk[j];
    wyk[i1] = wyk[i2] = kWgk[j];
    double wg = (j % 2 == 1) ? kWg[j / 2] : 0.0;
    wxg[i1] = wxg[i2] = wg;
    wyg[i1] = wyg[i2] = wg;
  }
  xs[7] = cx;
  ys[7] = cy;
  wxk[7] = wyk[7] = kWgk[7];
  wxg[7] = wyg[7] = kWg[3];
  double sk = 0.0, sg = 0.0;
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) {
      double v = f(xs[i], ys[j]);
      sk += wxk[i] * wyk[j] * v;
      sg += wxg[i] * wyg[j] * v;
    }
  }
  evals += 225;
  double scale = hx * hy;
  return {sk * scale, std::abs((sk - sg) * scale)};
}

}  // namespace

Result integrate2(const Fn2& f, double ax, double bx, double ay, double by,
                  const Options& opt) {
  Result res;
  if (!(bx > ax) || !(by > ay)) {
    res.converged = true;
    return res;
  }
  std::priority_queue<Cell2> heap;
  PanelEst first = gk15x15(f, ax, bx, ay, by, res.evals);
  heap.push({ax, bx, ay, by, first.value, first.error});
  double total = first.value;
  double toterr = first.error;
  while (toterr > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
         res.evals + 450 <= opt.max_evals) {
    Cell2 top = heap.top();
    heap.pop();
    bool split_x = (top.bx - top.ax) >= (top.by - top.ay);
    Cell2 c1 = top, c2 = top;
    if (split_x) {
      double m = 0.5 * (top.ax + top.bx);
      c1.bx = m;
      c2.ax = m;
    } else {
      double m = 0.5 * (top.ay + top.by);
      c1.by = m;
      c2.ay = m;
    }
    PanelEst e1 = gk15x15(f, c1.ax, c1.bx, c1.ay, c1.by, res.evals);
    PanelEst e2 = gk15x15(f, c2.ax, c2.bx, c2.ay, c2.by, res.evals);
    total += e1.value + e2.value - top.value;
    toterr += e1.error + e2.error - top.error;
    c1.value = e1.value;
    c1.error = e1.error;
    c2.value = e2.value;
    c2.error = e2.error;
    heap.push(c1);
    heap.push(c2);
  }
  res.value = total;
  res.error = toterr;
  res.converged = toterr <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return res;
}

}  // namespace nlphase::quad
