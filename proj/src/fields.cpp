#include "nlphase/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nlphase {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---- Grid -------------------------------------------------------------------

Grid Grid::line(int n, double length, Boundary b) {
  Grid g;
  g.dim = 1;
  g.extent = {length, 1.0};
  g.res = {n, 1};
  g.boundary = b;
  if (n <= 0 || !(length > 0.0)) throw std::invalid_argument("grid: bad line");
  return g;
}

Grid Grid::plane(int nx, int ny, double lx, double ly, Boundary b) {
  Grid g;
  g.dim = 2;
  g.extent = {lx, ly};
  g.res = {nx, ny};
  g.boundary = b;
  if (nx <= 0 || ny <= 0 || !(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("grid: bad plane");
  return g;
}

double Grid::max_spacing() const {
  double s = spacing(0);
  if (dim == 2) s = std::max(s, spacing(1));
  return s;
}

double Grid::cell_volume() const {
  double v = spacing(0);
  if (dim == 2) v *= spacing(1);
  return v;
}

Vec Grid::center(long idx) const {
  int i = static_cast<int>(idx % res[0]);
  int j = static_cast<int>(idx / res[0]);
  Vec c = {(i + 0.5) * spacing(0), 0.0};
  if (dim == 2) c[1] = (j + 0.5) * spacing(1);
  return c;
}

bool Grid::same_layout(const Grid& o) const {
  return dim == o.dim && res == o.res && extent == o.extent && boundary == o.boundary;
}

std::string Grid::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << "dim=" << dim << " res=" << res[0] << "x" << res[1] << " extent="
     << extent[0] << "x" << extent[1]
     << " bc=" << (boundary == Boundary::Periodic ? "periodic" : "boxed");
  return os.str();
}

void Field::clamp_unit() {
  for (double& v : values) v = std::clamp(v, -1.0, 1.0);
}

double Field::mean() const {
  Accumulator acc;
  for (double v : values) acc.add(v);
  return acc.value() / static_cast<double>(values.size());
}

// ---- masks ---------------------------------------------------------------------

Mask mask_all(const Grid& g) { return Mask(static_cast<std::size_t>(g.ncells()), 1); }
Mask mask_none(const Grid& g) { return Mask(static_cast<std::size_t>(g.ncells()), 0); }

Mask mask_box(const Grid& g, Vec lo, Vec hi) {
  Mask m(static_cast<std::size_t>(g.ncells()), 0);
  for (long idx = 0; idx < g.ncells(); ++idx) {
    Vec c = g.center(idx);
    bool in = c[0] > lo[0] && c[0] < hi[0];
    if (g.dim == 2) in = in && c[1] > lo[1] && c[1] < hi[1];
    m[static_cast<std::size_t>(idx)] = in ? 1 : 0;
  }
  return m;
}

Mask mask_complement(const Mask& m) {
  Mask out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 0 : 1;
  return out;
}

Mask mask_and(const Mask& a, const Mask& b) {
  Mask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
  return out;
}

Mask mask_or(const Mask& a, const Mask& b) {
  Mask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
  return out;
}

Mask mask_minus(const Mask& a, const Mask& b) {
  Mask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && !b[i]) ? 1 : 0;
  return out;
}

long mask_count(const Mask& m) {
  long n = 0;
  for (auto v : m) n += v ? 1 : 0;
  return n;
}

double mask_volume(const Grid& g, const Mask& m) {
  return static_cast<double>(mask_count(m)) * g.cell_volume();
}

bool masks_disjoint(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) return false;
  return true;
}

// ---- distance transform ----------------------------------------------------------

namespace {

// Unreachable sentinel for the distance transform; distance-squared values at
// or above half of it mean "no source cell".
constexpr double kFarSq = 1e30;

// Felzenszwalb-Huttenlocher 1D squared-distance transform with spacing h.
// Inputs use kFarSq instead of infinity so the parabola intersections stay
// finite (kFarSq cancels exactly between two far parabolas).
void dt1d(const std::vector<double>& f, std::vector<double>& d, double h, int n) {
  static thread_local std::vector<int> v;
  static thread_local std::vector<double> z;
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  const double h2 = h * h;
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double fq = f[static_cast<std::size_t>(q)];
    double s;
    while (true) {
      int p = v[static_cast<std::size_t>(k)];
      double fp = f[static_cast<std::size_t>(p)];
      s = ((fq + h2 * q * q) - (fp + h2 * p * p)) / (2.0 * h2 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[static_cast<std::size_t>(k)]) {  // k == 0: q dominates everywhere
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
    } else {
      ++k;
      v[static_cast<std::size_t>(k)] = q;
      z[static_cast<std::size_t>(k)] = s;
      z[static_cast<std::size_t>(k) + 1] = kInf;
    }
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < static_cast<double>(q)) ++j;
    int p = v[static_cast<std::size_t>(j)];
    d[static_cast<std::size_t>(q)] =
        h2 * (q - p) * (q - p) + f[static_cast<std::size_t>(p)];
  }
}

}  // namespace

std::vector<double> distance_to(const Grid& g, const Mask& set) {
  const bool periodic = g.boundary == Boundary::Periodic;
  const int tile = periodic ? 3 : 1;
  const int nx = g.res[0], ny = g.dim == 2 ? g.res[1] : 1;
  const int tx = nx * tile, ty = g.dim == 2 ? ny * tile : 1;
  std::vector<double> sq(static_cast<std::size_t>(tx) * ty, kFarSq);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (set[static_cast<std::size_t>(g.index(i, j))])
        for (int rj = 0; rj < (g.dim == 2 ? tile : 1); ++rj)
          for (int ri = 0; ri < tile; ++ri)
            sq[static_cast<std::size_t>(rj * ny + j) * tx + ri * nx + i] = 0.0;

  std::vector<double> row(static_cast<std::size_t>(std::max(tx, ty)));
  std::vector<double> drow(row.size());
  // transform along x
  for (int j = 0; j < ty; ++j) {
    double* base = sq.data() + static_cast<std::size_t>(j) * tx;
    row.assign(base, base + tx);
    dt1d(row, drow, g.spacing(0), tx);
    std::copy(drow.begin(), drow.begin() + tx, base);
  }
  // transform along y
  if (g.dim == 2) {
    for (int i = 0; i < tx; ++i) {
      for (int j = 0; j < ty; ++j) row[static_cast<std::size_t>(j)] = sq[static_cast<std::size_t>(j) * tx + i];
      dt1d(row, drow, g.spacing(1), ty);
      for (int j = 0; j < ty; ++j) sq[static_cast<std::size_t>(j) * tx + i] = drow[static_cast<std::size_t>(j)];
    }
  }
  // crop the center tile
  std::vector<double> out(static_cast<std::size_t>(g.ncells()));
  const int ox = periodic ? nx : 0, oy = (periodic && g.dim == 2) ? ny : 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double s = sq[static_cast<std::size_t>(j + oy) * tx + i + ox];
      out[static_cast<std::size_t>(g.index(i, j))] =
          s >= 0.5 * kFarSq ? kInf : std::sqrt(s);
    }
  return out;
}

Mask inner_set(const Grid& g, const Mask& E, double delta) {
  std::vector<double> d = distance_to(g, mask_complement(E));
  Mask out(E.size(), 0);
  for (std::size_t i = 0; i < E.size(); ++i)
    out[i] = (E[i] && d[i] > delta) ? 1 : 0;
  return out;
}

Mask outer_set(const Grid& g, const Mask& E, double delta) {
  std::vector<double> d = distance_to(g, E);
  Mask out(E.size(), 0);
  for (std::size_t i = 0; i < E.size(); ++i) out[i] = d[i] <= delta ? 1 : 0;
  return out;
}

double mask_distance(const Grid& g, const Mask& a, const Mask& b) {
  if (mask_count(a) == 0 || mask_count(b) == 0) return kInf;
  std::vector<double> d = distance_to(g, a);
  double best = kInf;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i]) best = std::min(best, d[i]);
  return best;
}

double lp_distance(const Field& u, const Field& v, int p, const Mask* where) {
  if (!u.grid.same_layout(v.grid)) throw std::invalid_argument("lp_distance: grid mismatch");
  Accumulator acc;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (where && !(*where)[i]) continue;
    double d = std::abs(u.values[i] - v.values[i]);
    acc.add(p == 1 ? d : d * d);
  }
  double s = acc.value() * u.grid.cell_volume();
  return p == 1 ? s : std::sqrt(s);
}

double transition_measure(const Field& u, double theta) {
  long n = 0;
  for (double v : u.values)
    if (std::abs(v) < 1.0 - theta) ++n;
  return static_cast<double>(n) * u.grid.cell_volume();
}

// ---- PolyhedralInterface ----------------------------------------------------------

double PolyhedralInterface::total_measure() const {
  Accumulator acc;
  for (const auto& f : facets) acc.add(f.measure);
  return acc.value();
}

double PolyhedralInterface::side(const Vec& x) const {
  switch (topology) {
    case Topology::Empty:
      return -1.0;
    case Topology::Point1D:
      return x[0] > anchor[0] ? 1.0 : -1.0;
    case Topology::HalfSpace:
      return dot(x - anchor, facets[0].normal) > 0.0 ? 1.0 : -1.0;
    case Topology::Polygon: {
      // ray-crossing parity
      bool inside = false;
      std::size_t n = polygon.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec& a = polygon[j];
        const Vec& b = polygon[i];
        if ((b[1] > x[1]) != (a[1] > x[1])) {
          double t = (x[1] - b[1]) / (a[1] - b[1]);
          double cx = b[0] + t * (a[0] - b[0]);
          if (cx > x[0]) inside = !inside;
        }
      }
      return inside ? inside_value : -inside_value;
    }
  }
  return -1.0;
}

PolyhedralInterface PolyhedralInterface::empty(int dim) {
  PolyhedralInterface p;
  p.dim = dim;
  p.topology = Topology::Empty;
  return p;
}

PolyhedralInterface PolyhedralInterface::point1d(double x0) {
  PolyhedralInterface p;
  p.dim = 1;
  p.topology = Topology::Point1D;
  p.anchor = vec1(x0);
  p.facets.push_back({vec1(x0), vec1(x0), vec1(1.0), 1.0});
  return p;
}

PolyhedralInterface PolyhedralInterface::line(Vec point, Vec normal, const Grid& g) {
  double n = norm(normal);
  if (!(n > 0.0)) throw std::invalid_argument("interface line: zero normal");
  normal = (1.0 / n) * normal;
  Vec dir = perp(normal);
  // clip point + t dir against the box [0,extent]
  double tmin = -kInf, tmax = kInf;
  for (int ax = 0; ax < 2; ++ax) {
    if (std::abs(dir[ax]) < 1e-15) {
      if (point[ax] < 0.0 || point[ax] > g.extent[ax])
        throw std::invalid_argument("interface line: misses the box");
      continue;
    }
    double t0 = (0.0 - point[ax]) / dir[ax];
    double t1 = (g.extent[ax] - point[ax]) / dir[ax];
    tmin = std::max(tmin, std::min(t0, t1));
    tmax = std::min(tmax, std::max(t0, t1));
  }
  if (!(tmax > tmin)) throw std::invalid_argument("interface line: misses the box");
  PolyhedralInterface p;
  p.dim = 2;
  p.topology = Topology::HalfSpace;
  p.anchor = point;
  Vec a = point + tmin * dir, b = point + tmax * dir;
  p.facets.push_back({a, b, normal, norm(b - a)});
  return p;
}

PolyhedralInterface PolyhedralInterface::polygon2d(std::vector<Vec> verts,
                                                   double inside_value) {
  if (verts.size() < 3) throw std::invalid_argument("polygon: need >= 3 vertices");
  PolyhedralInterface p;
  p.dim = 2;
  p.topology = Topology::Polygon;
  p.inside_value = inside_value;
  p.polygon = std::move(verts);
  std::size_t n = p.polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& a = p.polygon[i];
    const Vec& b = p.polygon[(i + 1) % n];
    Vec t = b - a;
    double len = norm(t);
    if (!(len > 0.0)) throw std::invalid_argument("polygon: repeated vertex");
    // CCW polygon: inward normal is +90 deg rotation of the edge tangent;
    // the normal must point into the +1 phase
    Vec inward = {-t[1] / len, t[0] / len};
    Vec nrm = inside_value > 0 ? inward : -1.0 * inward;
    p.facets.push_back({a, b, nrm, len});
    p.skeleton.push_back(a);
  }
  return p;
}

PolyhedralInterface PolyhedralInterface::square(Vec c, double side, double inside_value) {
  double h = side / 2.0;
  return polygon2d({vec2(c[0] - h, c[1] - h), vec2(c[0] + h, c[1] - h),
                    vec2(c[0] + h, c[1] + h), vec2(c[0] - h, c[1] + h)},
                   inside_value);
}

PolyhedralInterface PolyhedralInterface::regular_polygon(Vec c, double circumradius,
                                                         int nsides, double inside_value) {
  std::vector<Vec> verts;
  verts.reserve(static_cast<std::size_t>(nsides));
  for (int i = 0; i < nsides; ++i) {
    double th = 2.0 * kPi * i / nsides;
    verts.push_back(vec2(c[0] + circumradius * std::cos(th),
                         c[1] + circumradius * std::sin(th)));
  }
  return polygon2d(std::move(verts), inside_value);
}

std::string PolyhedralInterface::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  switch (topology) {
    case Topology::Empty: j["topology"] = "empty"; break;
    case Topology::HalfSpace: j["topology"] = "halfspace"; break;
    case Topology::Polygon: j["topology"] = "polygon"; break;
    case Topology::Point1D: j["topology"] = "point1d"; break;
  }
  j["inside_value"] = inside_value;
  j["anchor"] = {anchor[0], anchor[1]};
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : facets)
    fs.push_back({{"a", {f.a[0], f.a[1]}},
                  {"b", {f.b[0], f.b[1]}},
                  {"normal", {f.normal[0], f.normal[1]}},
                  {"measure", f.measure}});
  j["facets"] = fs;
  nlohmann::json poly = nlohmann::json::array();
  for (const auto& v : polygon) poly.push_back({v[0], v[1]});
  j["polygon"] = poly;
  nlohmann::json sk = nlohmann::json::array();
  for (const auto& v : skeleton) sk.push_back({v[0], v[1]});
  j["skeleton"] = sk;
  return j.dump(2);
}

PolyhedralInterface PolyhedralInterface::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::string topo = j.at("topology");
  int dim = j.at("dim");
  if (topo == "empty") return empty(dim);
  if (topo == "point1d") return point1d(j.at("anchor")[0]);
  if (topo == "polygon") {
    std::vector<Vec> verts;
    for (const auto& v : j.at("polygon")) verts.push_back(vec2(v[0], v[1]));
    return polygon2d(std::move(verts), j.at("inside_value"));
  }
  if (topo == "halfspace") {
    PolyhedralInterface p;
    p.dim = dim;
    p.topology = Topology::HalfSpace;
    p.anchor = vec2(j.at("anchor")[0], j.at("anchor")[1]);
    for (const auto& f : j.at("facets")) {
      Facet fc;
      fc.a = vec2(f.at("a")[0], f.at("a")[1]);
      fc.b = vec2(f.at("b")[0], f.at("b")[1]);
      fc.normal = vec2(f.at("normal")[0], f.at("normal")[1]);
      fc.measure = f.at("measure");
      p.facets.push_back(fc);
    }
    return p;
  }
  throw std::invalid_argument("interface json: unknown topology " + topo);
}

SharpFieldResult sharp_field(const PolyhedralInterface& sigma, const Grid& g) {
  SharpFieldResult out;
  out.field = Field(g, -1.0);
  for (long idx = 0; idx < g.ncells(); ++idx)
    out.field[idx] = sigma.side(g.center(idx));
  for (const auto& f : sigma.facets)
    if (f.measure > 0.0 && f.measure < g.max_spacing() && sigma.dim == 2)
      out.underresolved = true;
  return out;
}

// ---- mollifier -------------------------------------------------------------------

double mollifier_value(int dim, const Vec& x) {
  double r2 = dot(x, x);
  if (r2 >= 1.0) return 0.0;
  double t = 1.0 - r2;
  double c = dim == 1 ? 15.0 / 16.0 : 3.0 / kPi;
  return c * t * t;
}

MollifyResult mollify(const Field& u, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("mollify: tau must be positive");
  const Grid& g = u.grid;
  MollifyResult out;
  if (tau < g.max_spacing()) {
    out.field = u;
    out.tau_below_grid = true;
    return out;
  }
  const int rx = static_cast<int>(std::ceil(tau / g.spacing(0)));
  const int ry = g.dim == 2 ? static_cast<int>(std::ceil(tau / g.spacing(1))) : 0;
  // stencil weights: theta_tau at offset centers, normalized to unit mass
  std::vector<double> wts;
  std::vector<std::array<int, 2>> offs;
  double wsum = 0.0;
  for (int oj = -ry; oj <= ry; ++oj)
    for (int oi = -rx; oi <= rx; ++oi) {
      Vec d = {oi * g.spacing(0) / tau, oj * (g.dim == 2 ? g.spacing(1) : 0.0) / tau};
      double w = mollifier_value(g.dim, d);
      if (w <= 0.0) continue;
      offs.push_back({oi, oj});
      wts.push_back(w);
      wsum += w;
    }
  for (double& w : wts) w /= wsum;

  const int nx = g.res[0], ny = g.dim == 2 ? g.res[1] : 1;
  out.field = Field(g, 0.0);
  const bool periodic = g.boundary == Boundary::Periodic;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double acc = 0.0;
      double wacc = 0.0;
      for (std::size_t k = 0; k < offs.size(); ++k) {
        int ii = i + offs[k][0];
        int jj = j + offs[k][1];
        if (periodic) {
          ii = (ii % nx + nx) % nx;
          jj = ny > 1 ? (jj % ny + ny) % ny : 0;
        } else {
          if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
        }
        acc += wts[k] * u[g.index(ii, jj)];
        wacc += wts[k];
      }
      // boxed boundaries renormalize over the in-domain part of the stencil
      out.field[g.index(i, j)] = wacc > 0.0 ? acc / wacc : u[g.index(i, j)];
    }
  }
  return out;
}

// ---- cutoff & glue ----------------------------------------------------------------

CutoffProfile build_cutoff(const Grid& g, const Mask& P, const Mask& Q,
                           const Mask& R, const Mask& S, double eps) {
  const std::size_t n = static_cast<std::size_t>(g.ncells());
  if (P.size() != n || Q.size() != n || R.size() != n || S.size() != n)
    throw std::invalid_argument("build_cutoff: mask size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    int cnt = (P[i] ? 1 : 0) + (Q[i] ? 1 : 0) + (R[i] ? 1 : 0) + (S[i] ? 1 : 0);
    if (cnt != 1) throw std::invalid_argument("build_cutoff: P,Q,R,S must partition the grid");
  }
  CutoffProfile out;
  out.P = P;
  out.Q = Q;
  out.R = R;
  out.S = S;
  out.eps = eps;
  out.phi = Field(g, 0.0);
  Mask PQ = mask_or(P, Q);
  bool havePQ = mask_count(PQ) > 0, haveS = mask_count(S) > 0;
  std::vector<double> dS = haveS ? distance_to(g, S) : std::vector<double>(n, kInf);
  std::vector<double> dPQ = havePQ ? distance_to(g, PQ) : std::vector<double>(n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    if (PQ[i]) out.phi.values[i] = 1.0;
    else if (S[i]) out.phi.values[i] = 0.0;
    else {
      double a = dS[i], b = dPQ[i];
      if (a == kInf) out.phi.values[i] = 1.0;          // no S anywhere
      else if (b == kInf) out.phi.values[i] = 0.0;      // no P u Q anywhere
      else out.phi.values[i] = a / (a + b);             // linear ramp across R
    }
  }
  // measured discrete gradient
  double gmax = 0.0;
  const int nx = g.res[0], ny = g.dim == 2 ? g.res[1] : 1;
  const bool periodic = g.boundary == Boundary::Periodic;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double v = out.phi[g.index(i, j)];
      for (int ax = 0; ax < g.dim; ++ax) {
        int ii = i + (ax == 0 ? 1 : 0), jj = j + (ax == 1 ? 1 : 0);
        if (periodic) {
          ii %= nx;
          jj = ny > 1 ? jj % ny : 0;
        } else if (ii >= nx || jj >= ny) {
          continue;
        }
        gmax = std::max(gmax, std::abs(out.phi[g.index(ii, jj)] - v) / g.spacing(ax));
      }
    }
  out.max_gradient = gmax;
  if (gmax > 3.0 / eps + 1e-9)
    throw std::runtime_error("build_cutoff: ramp region too thin, gradient " +
                             std::to_string(gmax) + " exceeds 3/eps");
  return out;
}

Field glue(const Field& u, const Field& w, const CutoffProfile& cutoff) {
  if (!u.grid.same_layout(w.grid) || !u.grid.same_layout(cutoff.phi.grid))
    throw std::invalid_argument("glue: grid mismatch");
  Field v(u.grid, 0.0);
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    double p = cutoff.phi.values[i];
    // exact at the extremes so v == u on {phi=1} and v == w on {phi=0}
    if (p >= 1.0) v.values[i] = u.values[i];
    else if (p <= 0.0) v.values[i] = w.values[i];
    else v.values[i] = p * u.values[i] + (1.0 - p) * w.values[i];
  }
  return v;
}

// ---- serialization -----------------------------------------------------------------

void save_field(const Field& u, const std::string& path) {
  nlohmann::json j;
  j["dim"] = u.grid.dim;
  j["res"] = {u.grid.res[0], u.grid.res[1]};
  j["extent"] = {u.grid.extent[0], u.grid.extent[1]};
  j["boundary"] = u.grid.boundary == Boundary::Periodic ? "periodic" : "boxed";
  j["count"] = u.values.size();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_field: cannot open " + path);
  f << j.dump() << "\n";
  f.write(reinterpret_cast<const char*>(u.values.data()),
          static_cast<std::streamsize>(u.values.size() * sizeof(double)));
}

Field load_field(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_field: cannot open " + path);
  std::string header;
  std::getline(f, header);
  nlohmann::json j = nlohmann::json::parse(header);
  Grid g;
  g.dim = j.at("dim");
  g.res = {j.at("res")[0], j.at("res")[1]};
  g.extent = {j.at("extent")[0], j.at("extent")[1]};
  g.boundary = j.at("boundary") == "periodic" ? Boundary::Periodic : Boundary::Boxed;
  Field u(g, 0.0);
  std::size_t count = j.at("count");
  if (count != u.values.size()) throw std::runtime_error("load_field: header/grid mismatch");
  f.read(reinterpret_cast<char*>(u.values.data()),
         static_cast<std::streamsize>(count * sizeof(double)));
  if (!f) throw std::runtime_error("load_field: truncated payload");
  return u;
}

}  // namespace nlphase
