// Small shared utilities: fixed-capacity vectors for dim <= 2, compensated
// summation, seeded RNG derivation, and a deterministic chunked parallel map.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlphase {

// Spatial point/displacement. Only the first `dim` components are meaningful;
// unused components must be kept at zero so norms work unconditionally.
using Vec = std::array<double, 2>;

inline Vec vec1(double x) { return {x, 0.0}; }
inline Vec vec2(double x, double y) { return {x, y}; }

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec& a) { return std::hypot(a[0], a[1]); }
inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double c, const Vec& a) { return {c * a[0], c * a[1]}; }

// Unit vector at angle theta in the plane.
inline Vec unit_vec(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Counterclockwise perpendicular.
inline Vec perp(const Vec& a) { return {-a[1], a[0]}; }

// Neumaier compensated accumulator. Used wherever a reproducible sum matters
// (energy reductions, Monte Carlo chunk totals).
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// splitmix64; used to derive independent per-chunk seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Maps `fn` over chunk indices [0, nchunks) on up to `threads` workers and
// returns the results in chunk order, so any later reduction is deterministic
// regardless of thread count.
template <typename T>
std::vector<T> chunked_map(int nchunks, int threads, const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(nchunks));
  if (threads <= 1) {
    for (int c = 0; c < nchunks; ++c) out[static_cast<std::size_t>(c)] = fn(c);
    return out;
  }
  int next = 0;
  while (next < nchunks) {
    int batch = std::min(threads, nchunks - next);
    std::vector<std::future<T>> futs;
    futs.reserve(static_cast<std::size_t>(batch));
    for (int i = 0; i < batch; ++i)
      futs.push_back(std::async(std::launch::async, fn, next + i));
    for (int i = 0; i < batch; ++i)
      out[static_cast<std::size_t>(next + i)] = futs[static_cast<std::size_t>(i)].get();
    next += batch;
  }
  return out;
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace nlphase
