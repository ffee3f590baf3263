// Desk-scale verification harness for the sharp-interface limit: recovery
// sequences built from optimal profiles, the constructive shell-selection
// gluing (modification), the vertex-tube (skeleton) estimate, constrained
// minimization studies for the lower bound, and compactness diagnostics.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlphase/cell.hpp"
#include "nlphase/energy.hpp"
#include "nlphase/fields.hpp"

namespace nlphase {

struct EpsilonSchedule {
  std::vector<double> values;   // strictly decreasing
  double cells_per_eps = 8.0;   // grid rule: spacing <= eps / cells_per_eps

  static EpsilonSchedule geometric(double eps0, double factor, int count,
                                   double cells_per_eps = 8.0);
  void validate() const;  // throws on violations
  int resolution(double eps, double extent) const;
  Grid grid1d(double eps, double extent = 1.0, Boundary b = Boundary::Boxed) const;
  Grid grid2d(double eps, double lx = 1.0, double ly = 1.0,
              Boundary b = Boundary::Periodic) const;
};

struct RecoveryStep {
  double eps = 0.0;
  EnergyBreakdown energy;
  double l1_to_sharp = 0.0;
  double l2_to_sharp = 0.0;
  double transition01 = 0.0;  // measure of {|u| < 0.9}
  double transition05 = 0.0;  // measure of {|u| < 0.5}
};

struct RecoveryRun {
  PolyhedralInterface interface;
  std::vector<RecoveryStep> steps;
  double target = 0.0;            // limit energy (+ slack budget when used)
  double tolerance_factor = 1.05; // limsup check: final energy <= target * factor
  bool limsup_ok = false;
  Field final_field;  // recovery field at the smallest eps (plot snapshots)
  std::string to_csv() const;  // one row per epsilon
};

// Flat-interface recovery on the periodic unit square: two parallel
// interfaces orthogonal to the given axis at the two positions, fields
// u_eps(x) = profile(signed_distance/eps). Target: psi(axis) * total length.
RecoveryRun recovery_flat(int axis, double pos_lo, double pos_hi,
                          const EpsilonSchedule& sched, const Kernel& J,
                          const DoubleWell& W, double tolerance_factor = 1.05,
                          const CellOptions& cell_opt = {});

struct ModifyReport {
  Field v;
  double lhs = 0.0;   // F_eps(v, domain)
  double rhs = 0.0;   // F_eps(u, D) + F_eps(w, domain minus D_delta)
  double slack = 0.0; // lhs - rhs
  int M = 0;          // macro shell count in effect
  int M_raw = 0;      // the uncapped ceil(C/sigma) choice
  bool m_capped = false;
  int K = 0;  // micro shell count
  int macro_index = -1, micro_index = -1;
  double sigma = 0.0;
  double budget = 0.0;            // sigma * eps
  double best_discrepancy = 0.0;  // selected micro shell's weighted mismatch
  bool budget_ok = false;
  double mismatch_l1 = 0.0;  // ||u - w||_{L1(D minus D_delta)}
};

// Constructive gluing of u (kept on D_delta) and w (kept off D): picks the
// low-energy macro shell, then the micro shell minimizing the tail-weighted
// mismatch, builds the cutoff and blends. sigma defaults to
// sigma_frac * (energy budget).
ModifyReport modify(const Field& u, const Field& w, const Mask& D, double delta,
                    double eps, const Kernel& J, const DoubleWell& W,
                    double sigma_frac = 0.05);

// Polyhedral (2D polygon) recovery: per-facet profile fields glued into the
// mollified sharp field near the skeleton via modify; sharp outside the
// interface neighborhood. Target: sum psi(normal) * length + sigma with
// sigma = sigma_frac * (facet sum).
RecoveryRun recovery_polyhedral(const PolyhedralInterface& sigma,
                                const EpsilonSchedule& sched, const Kernel& J,
                                const DoubleWell& W, double sigma_frac = 0.05,
                                double tolerance_factor = 1.05,
                                const CellOptions& cell_opt = {});

struct SkeletonPoint {
  double delta = 0.0;
  double eps = 0.0;
  double lhs = 0.0;       // kinetic energy of the mollified field on the tube
  double vertex_count = 0.0;
  double C_fit = 0.0;     // lhs / (delta * vertex_count)
};

SkeletonPoint skeleton_estimate(const PolyhedralInterface& sigma, double delta,
                                double eps, const Kernel& J,
                                double cells_per_eps = 8.0);

struct SkeletonSweep {
  std::vector<SkeletonPoint> points;
  double loglog_slope = 0.0;  // of lhs vs delta
  double C_fit = 0.0;         // mean of the per-point fits
  std::string to_csv() const;
};

SkeletonSweep skeleton_sweep(const PolyhedralInterface& sigma,
                             const std::vector<double>& deltas,
                             double eps_over_delta, const Kernel& J,
                             double cells_per_eps = 8.0);

struct LiminfStep {
  double eps = 0.0;
  double min_energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct LiminfReport {
  std::vector<LiminfStep> steps;
  double target = 0.0;
  double tol = 0.05;
  bool final_ok = false;  // |min F - target| <= tol * target at smallest eps
  bool trend_ok = false;  // |min F - target| nonincreasing along the schedule
  bool lower_ok = false;  // min F >= target * (1 - tol) at the smallest eps
  std::string to_csv() const;
};

// Constrained minimization on [0,1] with boundary layers pinned to -1 / +1;
// descent from several initializations, best kept. Target psi(e1).
LiminfReport liminf_study_1d(const EpsilonSchedule& sched, const Kernel& J,
                             const DoubleWell& W, double tol = 0.05,
                             int n_inits = 4, std::uint64_t seed = 1234,
                             const CellOptions& cell_opt = {});

// 2D strip with pinned -1/+1 on opposite sides; target psi(e1) * height.
LiminfReport liminf_study_2d(double eps, const Kernel& J, const DoubleWell& W,
                             double height = 0.5, double tol = 0.10,
                             std::uint64_t seed = 99,
                             const CellOptions& cell_opt = {});

struct CompactnessReport {
  std::vector<double> eps;
  std::vector<double> transition01;
  std::vector<double> transition05;
  std::vector<double> pairwise_l1;  // upper triangle, row-major
  double loglog_slope01 = 0.0;      // transition measure vs eps
  std::string to_csv() const;
};

CompactnessReport compactness_diagnostic(const std::vector<Field>& fields,
                                         const std::vector<double>& eps);

// least-squares slope of log(y) against log(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlphase
