#pragma once

// Shared helpers for the test binaries: a deterministic random source and
// generators for directions, bodies and admissible measures, plus small
// independent oracles (shoelace area, unimodular matrices) used to
// cross-check the library without going through its own pipelines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "logmink/concentration.hpp"
#include "logmink/core.hpp"
#include "logmink/errors.hpp"
#include "logmink/geometry.hpp"
#include "logmink/measure.hpp"

namespace testutil {

using logmink::Mat;
using logmink::Vec;

// mt19937_64 raw bits with hand-rolled mappings, so every platform and
// standard library produces the same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t bits() { return state_(); }

  double uniform() {  // [0, 1)
    return static_cast<double>(state_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(state_() % static_cast<std::uint64_t>(
                                     hi - lo + 1));
  }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 state_;
  bool have_spare_ = false;
  double spare_ = 0;
};

inline Vec random_unit(Rng& rng, int n) {
  while (true) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.gauss();
    const double norm = v.norm();
    if (norm > 1e-6) return v / norm;
  }
}

// m pairwise well-separated unit reps spanning the space.  On the line only
// one antipodal pair exists, so m collapses to 1 there.
inline logmink::DirectionSet random_directions(Rng& rng, int n, int m) {
  if (n == 1) m = 1;
  while (true) {
    std::vector<Vec> reps;
    int attempts = 0;
    while (static_cast<int>(reps.size()) < m && attempts < 1000) {
      ++attempts;
      Vec u = random_unit(rng, n);
      bool ok = true;
      for (const Vec& v : reps)
        if (std::abs(u.dot(v)) > 1.0 - 1e-4) ok = false;
      if (ok) reps.push_back(std::move(u));
    }
    if (static_cast<int>(reps.size()) < m) continue;
    if (logmink::span_rank(n, reps) == n)
      return logmink::DirectionSet(n, std::move(reps));
  }
}

inline logmink::Polytope random_body(Rng& rng, int n, int m) {
  while (true) {
    logmink::DirectionSet dirs = random_directions(rng, n, m);
    Vec h(dirs.count());
    for (int i = 0; i < h.size(); ++i) h[i] = rng.uniform(0.5, 2.0);
    try {
      return logmink::build_wulff_body(dirs,
                                       logmink::SupportVector(dirs, h));
    } catch (const logmink::Error&) {
      // extremely flat draw; take another
    }
  }
}

// Cone-volume measure of a random body, masses jittered within the strict
// region (retry until the checker agrees the result is strictly admissible).
// With exactly n direction pairs every mass sits at its bound (the body is a
// parallelepiped), so strictness needs at least n + 1 active pairs.
inline logmink::DiscreteMeasure random_strict_measure(Rng& rng, int n, int m,
                                                      double jitter = 0.05) {
  if (n > 1 && m <= n) m = n + 1;
  while (true) {
    const logmink::Polytope P = random_body(rng, n, m);
    const logmink::DiscreteMeasure base = logmink::cone_volume_measure(P);
    std::vector<logmink::DiscreteMeasure::Pair> pairs;
    for (const auto& p : base.support())
      pairs.push_back({p.u, p.mass * rng.uniform(1.0 - jitter, 1.0 + jitter)});
    logmink::DiscreteMeasure mu(n, std::move(pairs));
    if (n > 1 && mu.count() <= n) continue;  // inactive slab dropped a pair
    const logmink::ConcentrationReport rep =
        logmink::check_subspace_concentration(mu);
    if (rep.status == logmink::ConcentrationStatus::StrictlySatisfied)
      return mu;
  }
}

// Shoelace area of a convex 2-d point set (ordering handled internally).
inline double shoelace_area(std::vector<Vec> pts) {
  const int k = static_cast<int>(pts.size());
  if (k < 3) return 0;
  Vec c = Vec::Zero(2);
  for (const Vec& p : pts) c += p;
  c /= k;
  std::sort(pts.begin(), pts.end(), [&](const Vec& a, const Vec& b) {
    return std::atan2(a[1] - c[1], a[0] - c[0]) <
           std::atan2(b[1] - c[1], b[0] - c[0]);
  });
  double twice = 0;
  for (int i = 0; i < k; ++i) {
    const Vec& p = pts[i];
    const Vec& q = pts[(i + 1) % k];
    twice += p[0] * q[1] - p[1] * q[0];
  }
  return 0.5 * std::abs(twice);
}

// Product of random shears: determinant exactly 1 up to rounding.
inline Mat random_unimodular(Rng& rng, int n, int shears = 6) {
  Mat M = Mat::Identity(n, n);
  for (int k = 0; k < shears; ++k) {
    const int i = rng.uniform_int(0, n - 1);
    int j = rng.uniform_int(0, n - 2);
    if (j >= i) ++j;
    Mat S = Mat::Identity(n, n);
    S(i, j) = rng.uniform(-1.0, 1.0);
    M = M * S;
  }
  return M;
}

// Convenience constructors for the hand-computed fixtures.

inline Vec basis_vec(int n, int i) {
  Vec e = Vec::Zero(n);
  e[i] = 1;
  return e;
}

inline logmink::DiscreteMeasure cube_measure() {
  std::vector<std::pair<Vec, double>> raw;
  for (int i = 0; i < 3; ++i) raw.push_back({basis_vec(3, i), 4.0 / 3.0});
  return logmink::measure_from_pairs(3, raw);
}

inline logmink::DiscreteMeasure octahedron_measure() {
  std::vector<std::pair<Vec, double>> raw;
  for (int s1 = -1; s1 <= 1; s1 += 2)
    for (int s2 = -1; s2 <= 1; s2 += 2) {
      Vec u(3);
      u << 1.0, static_cast<double>(s1), static_cast<double>(s2);
      raw.push_back({u / u.norm(), 1.0 / 6.0});
    }
  return logmink::measure_from_pairs(3, raw);
}

inline logmink::DiscreteMeasure hexagon_measure(double f0 = 1.0,
                                                double f1 = 1.0,
                                                double f2 = 1.0) {
  std::vector<std::pair<Vec, double>> raw;
  const double base = 1.0 / std::sqrt(3.0);
  const double f[3] = {f0, f1, f2};
  for (int k = 0; k < 3; ++k) {
    Vec u(2);
    u << std::cos(M_PI * k / 3.0), std::sin(M_PI * k / 3.0);
    raw.push_back({u, base * f[k]});
  }
  return logmink::measure_from_pairs(2, raw);
}

inline logmink::DiscreteMeasure violating_measure() {
  std::vector<std::pair<Vec, double>> raw;
  raw.push_back({basis_vec(2, 0), 1.5});
  raw.push_back({basis_vec(2, 1), 0.5});
  return logmink::measure_from_pairs(2, raw);
}

inline logmink::Polytope cube_body() {
  std::vector<Vec> reps;
  for (int i = 0; i < 3; ++i) reps.push_back(basis_vec(3, i));
  logmink::DirectionSet dirs(3, reps);
  return logmink::build_wulff_body(
      dirs, logmink::SupportVector(dirs, Vec::Ones(3)));
}

inline logmink::Polytope octahedron_body() {
  std::vector<Vec> reps;
  for (int s1 = -1; s1 <= 1; s1 += 2)
    for (int s2 = -1; s2 <= 1; s2 += 2) {
      Vec u(3);
      u << 1.0, static_cast<double>(s1), static_cast<double>(s2);
      reps.push_back(u / u.norm());
    }
  logmink::DirectionSet dirs(3, reps);
  return logmink::build_wulff_body(
      dirs, logmink::SupportVector(
                dirs, (Vec::Ones(4) / std::sqrt(3.0)).eval()));
}

inline logmink::Polytope hexagon_body() {
  std::vector<Vec> reps;
  for (int k = 0; k < 3; ++k) {
    Vec u(2);
    u << std::cos(M_PI * k / 3.0), std::sin(M_PI * k / 3.0);
    reps.push_back(u);
  }
  logmink::DirectionSet dirs(2, reps);
  return logmink::build_wulff_body(
      dirs, logmink::SupportVector(dirs, Vec::Ones(3)));
}

}  // namespace testutil
