#include "nlphase/integralgeom.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "nlphase/quadrature.hpp"

namespace nlphase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clip the line z*eta + t*xi against an axis rectangle; returns the t-interval
// or an empty (lo > hi) pair.
std::pair<double, double> clip_line(const Rect& r, const Vec& base, const Vec& xi) {
  double tlo = -kInf, thi = kInf;
  for (int ax = 0; ax < 2; ++ax) {
    if (std::abs(xi[ax]) < 1e-15) {
      if (base[ax] < r.lo[ax] || base[ax] > r.hi[ax]) return {1.0, 0.0};
      continue;
    }
    double t0 = (r.lo[ax] - base[ax]) / xi[ax];
    double t1 = (r.hi[ax] - base[ax]) / xi[ax];
    tlo = std::max(tlo, std::min(t0, t1));
    thi = std::min(thi, std::max(t0, t1));
  }
  return {tlo, thi};
}

// 7-point Gauss on [a, b]
template <typename F>
double gauss7(const F& f, double a, double b) {
  static const double x[3] = {0.405845151377397166906606412077,
                              0.741531185599394439863864773281,
                              0.949107912342758524526189684048};
  static const double w[4] = {0.417959183673469387755102040816,
                              0.381830050505118944950369775489,
                              0.279705391489276667901467771424,
                              0.129484966168869693270611432679};
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = w[0] * f(c);
  for (int j = 0; j < 3; ++j)
    s += w[j + 1] * (f(c - h * x[j]) + f(c + h * x[j]));
  return s * h;
}

}  // namespace

SliceCheck bp_check(const std::function<double(Vec, Vec)>& f, Rect A, Rect B,
                    long samples, std::uint64_t seed, int threads) {
  SliceCheck out;
  out.samples = samples;
  out.seed = seed;

  // direct side: nested adaptive rectangle quadrature
  quad::Options outer_opt;
  outer_opt.rel_tol = 2e-4;
  outer_opt.abs_tol = 1e-10;
  outer_opt.max_evals = 300000;
  quad::Options inner_opt;
  inner_opt.rel_tol = 1e-5;
  inner_opt.abs_tol = 1e-12;
  inner_opt.max_evals = 20000;
  out.lhs = quad::integrate2(
                [&](double x0, double x1) {
                  Vec x = vec2(x0, x1);
                  return quad::integrate2(
                             [&](double y0, double y1) {
                               return f(x, vec2(y0, y1));
                             },
                             B.lo[0], B.hi[0], B.lo[1], B.hi[1], inner_opt)
                      .value;
                },
                A.lo[0], A.hi[0], A.lo[1], A.hi[1], outer_opt)
                .value;

  // Monte Carlo side over lines
  double Z = 0.0;
  for (const Rect* r : {&A, &B})
    for (double cx : {r->lo[0], r->hi[0]})
      for (double cy : {r->lo[1], r->hi[1]}) Z = std::max(Z, std::hypot(cx, cy));

  const long chunk_size = 65536;
  const int nchunks = static_cast<int>((samples + chunk_size - 1) / chunk_size);
  struct ChunkStat {
    double sum = 0.0, sumsq = 0.0;
    long n = 0;
  };
  auto run_chunk = [&](int c) -> ChunkStat {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
    std::uniform_real_distribution<double> uang(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> uz(-Z, Z);
    ChunkStat st;
    long n = std::min(chunk_size, samples - static_cast<long>(c) * chunk_size);
    for (long i = 0; i < n; ++i) {
      LineSample ls;
      ls.xi = unit_vec(uang(rng));
      ls.z = uz(rng);
      ls.weight = 2.0 * kPi * Z;  // (1/2) * (2 pi) * (2 Z) / samples-mean
      Vec base = ls.z * perp(ls.xi);
      auto [a0, a1] = clip_line(A, base, ls.xi);
      auto [b0, b1] = clip_line(B, base, ls.xi);
      double inner = 0.0;
      if (a1 > a0 && b1 > b0) {
        Vec xi = ls.xi;
        auto point = [&](double t) { return base + t * xi; };
        inner = gauss7(
            [&](double s) {
              Vec xs = point(s);
              // split the |t - s| kink when it lies inside [b0, b1]
              auto seg = [&](double lo, double hi) {
                if (!(hi > lo)) return 0.0;
                return gauss7(
                    [&](double t) {
                      return f(xs, point(t)) * std::abs(t - s);
                    },
                    lo, hi);
              };
              if (s > b0 && s < b1) return seg(b0, s) + seg(s, b1);
              return seg(b0, b1);
            },
            a0, a1);
      }
      double val = ls.weight * inner;
      st.sum += val;
      st.sumsq += val * val;
      st.n += 1;
    }
    return st;
  };
  std::vector<ChunkStat> stats = chunked_map<ChunkStat>(nchunks, threads, run_chunk);
  Accumulator sum, sumsq;
  long n = 0;
  for (const auto& st : stats) {
    sum.add(st.sum);
    sumsq.add(st.sumsq);
    n += st.n;
  }
  double mean = sum.value() / static_cast<double>(n);
  double var = std::max(sumsq.value() / static_cast<double>(n) - mean * mean, 0.0);
  out.rhs_mc = mean;
  out.stderr_mc = std::sqrt(var / static_cast<double>(n));
  out.rel_err = out.lhs != 0.0 ? std::abs(out.rhs_mc - out.lhs) / std::abs(out.lhs)
                               : std::abs(out.rhs_mc);
  out.identity_violation =
      out.lhs == 0.0 && std::abs(out.rhs_mc) > 3.0 * out.stderr_mc;
  return out;
}

std::string SliceCheck::to_json() const {
  nlohmann::json j;
  j["lhs"] = lhs;
  j["rhs"] = rhs_mc;
  j["stderr"] = stderr_mc;
  j["rel_err"] = rel_err;
  j["samples"] = samples;
  j["seed"] = seed;
  j["verdict"] = !identity_violation;
  return j.dump(2);
}

// ---- tube volumes -----------------------------------------------------------------

namespace {

double point_segment_dist(const Vec& p, const Vec& a, const Vec& b) {
  Vec ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

}  // namespace

SteinerCheck steiner_check(const std::vector<std::pair<Vec, Vec>>& segments,
                           double delta, int grid_n) {
  SteinerCheck out;
  if (segments.empty()) {
    out.holds = true;
    return out;
  }
  Vec lo = segments[0].first, hi = segments[0].first;
  double total_len = 0.0;
  for (const auto& s : segments) {
    for (const Vec* p : {&s.first, &s.second}) {
      lo[0] = std::min(lo[0], (*p)[0]);
      lo[1] = std::min(lo[1], (*p)[1]);
      hi[0] = std::max(hi[0], (*p)[0]);
      hi[1] = std::max(hi[1], (*p)[1]);
    }
    total_len += norm(s.second - s.first);
  }
  double margin = delta * 1.5;
  lo = lo - vec2(margin, margin);
  hi = hi + vec2(margin, margin);
  double hx = (hi[0] - lo[0]) / grid_n;
  double hy = (hi[1] - lo[1]) / grid_n;
  long count = 0;
  for (int j = 0; j < grid_n; ++j) {
    double y = lo[1] + (j + 0.5) * hy;
    for (int i = 0; i < grid_n; ++i) {
      double x = lo[0] + (i + 0.5) * hx;
      Vec p = vec2(x, y);
      for (const auto& s : segments) {
        if (point_segment_dist(p, s.first, s.second) < delta) {
          ++count;
          break;
        }
      }
    }
  }
  out.tube_measure = static_cast<double>(count) * hx * hy;
  out.bound = 2.0 * kPi * delta * total_len;
  // counting error: one cell-diagonal band around the tube boundary
  double tube_perimeter = 2.0 * total_len + 2.0 * kPi * delta * static_cast<double>(segments.size());
  out.grid_tol = 2.0 * std::hypot(hx, hy) * tube_perimeter;
  out.holds = out.tube_measure <= out.bound + out.grid_tol;
  return out;
}

std::pair<double, double> steiner_leading_fit(
    const std::vector<std::pair<Vec, Vec>>& segments,
    const std::vector<double>& deltas, int grid_n) {
  // least squares for tube(delta) = c1 delta + c2 delta^2
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (double d : deltas) {
    double m = steiner_check(segments, d, grid_n).tube_measure;
    s11 += d * d;
    s12 += d * d * d;
    s22 += d * d * d * d;
    b1 += d * m;
    b2 += d * d * m;
  }
  double det = s11 * s22 - s12 * s12;
  return {(b1 * s22 - b2 * s12) / det, (s11 * b2 - s12 * b1) / det};
}

std::string SteinerCheck::to_json() const {
  nlohmann::json j;
  j["lhs"] = tube_measure;
  j["rhs"] = bound;
  j["grid_tol"] = grid_tol;
  j["verdict"] = holds;
  return j.dump(2);
}

// ---- far-field line integrals --------------------------------------------------------

double farfield_line_integral(const Kernel& J, const Vec& xi) {
  Kernel1D lk = line_kernel(J, xi);
  return lk.excess_tail(2.0);
}

FarfieldReport farfield_sphere_check(const Kernel& J, int directions) {
  FarfieldReport out;
  Accumulator acc;
  bool divergent = false;
  for (int i = 0; i < directions; ++i) {
    double th = 2.0 * kPi * i / directions;
    double v = farfield_line_integral(J, unit_vec(th));
    out.directions.push_back(th);
    out.values.push_back(v);
    if (!std::isfinite(v)) divergent = true;
    acc.add(v);
  }
  out.divergent = divergent;
  out.sphere_integral = divergent ? kInf
                                  : acc.value() * 2.0 * kPi / directions;
  MomentResult lt = log_tail_moment(J, 2.0);
  out.log_tail_bound = lt.finite ? lt.value : kInf;
  if (divergent) {
    out.holds = !lt.finite;  // both sides blow up together
  } else {
    out.holds = out.sphere_integral <= out.log_tail_bound * (1.0 + 1e-9) + 1e-12;
  }
  return out;
}

std::string FarfieldReport::to_json() const {
  nlohmann::json j;
  j["sphere_integral"] = divergent ? 0.0 : sphere_integral;
  j["divergent"] = divergent;
  j["log_tail_bound"] = std::isfinite(log_tail_bound) ? log_tail_bound : 0.0;
  j["log_tail_finite"] = std::isfinite(log_tail_bound);
  j["verdict"] = holds;
  j["directions"] = directions.size();
  return j.dump(2);
}

}  // namespace nlphase
