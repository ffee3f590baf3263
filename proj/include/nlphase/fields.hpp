// Grid-discretized fields on 1D/2D boxes (periodic or boxed), cell-mask
// regions with exact Euclidean distance transforms, polyhedral +-1
// interfaces, mollification, and the cutoff/gluing constructions.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlphase/common.hpp"

namespace nlphase {

enum class Boundary { Periodic, Boxed };

struct Grid {
  int dim = 1;
  std::array<double, 2> extent = {1.0, 1.0};
  std::array<int, 2> res = {1, 1};
  Boundary boundary = Boundary::Boxed;

  static Grid line(int n, double length = 1.0, Boundary b = Boundary::Boxed);
  static Grid plane(int nx, int ny, double lx = 1.0, double ly = 1.0,
                    Boundary b = Boundary::Boxed);

  double spacing(int axis) const { return extent[axis] / res[axis]; }
  double max_spacing() const;
  double cell_volume() const;
  long ncells() const { return static_cast<long>(res[0]) * (dim == 2 ? res[1] : 1); }
  long index(int i, int j = 0) const { return static_cast<long>(j) * res[0] + i; }
  Vec center(long idx) const;
  bool same_layout(const Grid& o) const;
  std::string fingerprint() const;
};

struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.ncells()), fill) {}
  double& operator[](long i) { return values[static_cast<std::size_t>(i)]; }
  double operator[](long i) const { return values[static_cast<std::size_t>(i)]; }
  void clamp_unit();  // project values onto [-1, 1]
  double mean() const;
};

// Cell mask over a grid (1 = in the region).
using Mask = std::vector<std::uint8_t>;

Mask mask_all(const Grid& g);
Mask mask_none(const Grid& g);
// Axis-aligned box in physical coordinates; cells whose center lies inside.
Mask mask_box(const Grid& g, Vec lo, Vec hi);
Mask mask_complement(const Mask& m);
Mask mask_and(const Mask& a, const Mask& b);
Mask mask_or(const Mask& a, const Mask& b);
Mask mask_minus(const Mask& a, const Mask& b);
long mask_count(const Mask& m);
double mask_volume(const Grid& g, const Mask& m);
bool masks_disjoint(const Mask& a, const Mask& b);

// Exact Euclidean distance (cell centers) from every cell to the nearest cell
// of `set`; respects periodic wrap. Empty set gives +inf everywhere.
std::vector<double> distance_to(const Grid& g, const Mask& set);

// Inner set: cells of E at center distance > delta from the complement.
Mask inner_set(const Grid& g, const Mask& E, double delta);
// Outer set: cells at center distance <= delta from E.
Mask outer_set(const Grid& g, const Mask& E, double delta);

// Shortest center-to-center distance between two masks (+inf if either empty).
double mask_distance(const Grid& g, const Mask& a, const Mask& b);

// L^p distance between fields on a shared grid (p = 1 or 2), and the measure
// of the transition region {| |u| - 1 | > theta}.
double lp_distance(const Field& u, const Field& v, int p, const Mask* where = nullptr);
double transition_measure(const Field& u, double theta);

// ---- polyhedral interfaces ---------------------------------------------------

struct Facet {
  Vec a{}, b{};       // segment endpoints (dim 2); point a==b in dim 1
  Vec normal{};       // unit; points into the +1 phase
  double measure = 0; // H^{dim-1}: length in 2D, 1 in 1D
};

// Flat-piece description of the jump set of a +-1 field, with the vertex
// skeleton (the dim-2 facets; counting measure in 2D).
struct PolyhedralInterface {
  enum class Topology { Empty, HalfSpace, Polygon, Point1D };
  int dim = 2;
  Topology topology = Topology::Empty;
  std::vector<Facet> facets;
  std::vector<Vec> skeleton;  // interior vertices
  std::vector<Vec> polygon;   // CCW vertices when Topology::Polygon
  Vec anchor{};               // point on the interface (HalfSpace / Point1D)
  double inside_value = 1.0;  // phase inside a polygon

  double total_measure() const;
  double skeleton_count() const { return static_cast<double>(skeleton.size()); }
  // signed side: +1 where the induced field is +1
  double side(const Vec& x) const;

  static PolyhedralInterface empty(int dim);
  static PolyhedralInterface point1d(double x0);  // -1 left of x0, +1 right
  // straight interface through the box of grid g
  static PolyhedralInterface line(Vec point, Vec normal, const Grid& g);
  static PolyhedralInterface polygon2d(std::vector<Vec> ccw_vertices,
                                       double inside_value = 1.0);
  static PolyhedralInterface square(Vec center, double side, double inside_value = 1.0);
  static PolyhedralInterface regular_polygon(Vec center, double circumradius,
                                             int nsides, double inside_value = 1.0);

  std::string to_json() const;
  static PolyhedralInterface from_json(const std::string& text);
};

struct SharpFieldResult {
  Field field;
  bool underresolved = false;  // some facet is thinner than a cell
};

// +-1 field induced by the interface's side assignment.
SharpFieldResult sharp_field(const PolyhedralInterface& sigma, const Grid& g);

// ---- mollification -----------------------------------------------------------

// Fixed polynomial bump theta(x) = c (1-|x|^2)^2 on |x|<1, unit mass,
// |grad theta|_inf <= 2 (certified in tests). theta_tau(x) = tau^-dim theta(x/tau).
double mollifier_value(int dim, const Vec& x);  // theta at scale 1

struct MollifyResult {
  Field field;
  bool tau_below_grid = false;  // tau < spacing: convolution degenerates
};

// Discrete convolution with theta_tau; weights renormalized to unit mass so
// the range [-1,1] and (on periodic grids) the mean are preserved exactly.
MollifyResult mollify(const Field& u, double tau);

// ---- cutoff & gluing -----------------------------------------------------------

struct CutoffProfile {
  Field phi;  // 1 on P u Q, 0 on S, ramp across R
  Mask P, Q, R, S;
  double eps = 0.0;
  double max_gradient = 0.0;  // measured discrete gradient
};

// Builds the ramp phi = d_S / (d_S + d_{PuQ}) across R. P,Q,R,S must
// partition the grid; throws if the measured gradient exceeds 3/eps.
CutoffProfile build_cutoff(const Grid& g, const Mask& P, const Mask& Q,
                           const Mask& R, const Mask& S, double eps);

// v = phi u + (1 - phi) w; equals u where phi = 1 and w where phi = 0.
Field glue(const Field& u, const Field& w, const CutoffProfile& cutoff);

// ---- serialization -------------------------------------------------------------

// Single-file format: one JSON header line (grid metadata) + raw doubles.
void save_field(const Field& u, const std::string& path);
Field load_field(const std::string& path);

}  // namespace nlphase
