#pragma once

#include <utility>
#include <vector>

#include "logmink/core.hpp"

namespace logmink {

// Even (origin-symmetric) discrete measure on the unit sphere.  Only one
// representative per antipodal pair {u, -u} is stored; the mass attached to a
// rep is the mass on u alone, so the total measure is 2 * sum of rep masses.
class DiscreteMeasure {
 public:
  struct Pair {
    Vec u;        // unit representative
    double mass;  // > 0, mass on u (equal mass sits on -u)
  };

  // Strict constructor: reps must be unit within 1e-12, masses positive, and
  // no two reps may lie on the same line.  Use measure_from_pairs for raw data.
  DiscreteMeasure(int dim, std::vector<Pair> support);

  int dim() const { return dim_; }
  const std::vector<Pair>& support() const { return support_; }
  int count() const { return static_cast<int>(support_.size()); }

  // Total mass of the even extension: exactly 2 * sum of rep masses.
  double total() const { return total_; }

  DiscreteMeasure scaled(double factor) const;

 private:
  int dim_;
  std::vector<Pair> support_;
  double total_;
};

// Lenient builder: normalizes non-unit vectors and merges duplicate or
// antipodal entries into the first occurrence (masses add).  Throws
// ZeroVector / ZeroMass on unusable entries and EmptyMeasure when nothing
// survives.
DiscreteMeasure measure_from_pairs(
    int dim, const std::vector<std::pair<Vec, double>>& raw);

struct FirstMoment {
  Vec moment;       // sum of mass * u over the data
  double residual;  // Euclidean norm of the moment
  bool pass;        // residual <= tol * total mass
};

// First-moment diagnostic.  For a DiscreteMeasure the sum runs over the full
// even extension and cancels exactly; the raw overload works on one-sided
// facet data (normal, weight) as produced by a boundary walk.
FirstMoment check_first_moment(const DiscreteMeasure& mu, double tol = 1e-9);
FirstMoment check_first_moment_raw(
    int dim, const std::vector<std::pair<Vec, double>>& raw,
    double tol = 1e-9);

}  // namespace logmink
