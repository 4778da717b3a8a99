#pragma once

#include <vector>

#include "logmink/core.hpp"
#include "logmink/measure.hpp"

namespace logmink {

// Origin-symmetric polytope kernel.
//
// Bodies are intersections of symmetric slabs |x . u_i| <= h_i over a fixed
// set of unit directions.  One representative u_i per antipodal pair is
// stored; every facet record exists in a + and a - flavour.  Vertex
// enumeration is exhaustive over n-subsets of the 2m bounding hyperplanes,
// which is exact and fast at desk scale (m <= ~30 pairs, dimension <= ~5) but
// deliberately not an output-sensitive hull algorithm.

// Unit direction representatives, one per antipodal pair, pairwise
// non-parallel.  Immutable after construction.
class DirectionSet {
 public:
  DirectionSet(int dim, std::vector<Vec> reps, const Tolerances& tol = {});

  // Normalizes near-unit or non-unit input before validating.
  static DirectionSet normalized(int dim, std::vector<Vec> raw,
                                 const Tolerances& tol = {});

  int dim() const { return dim_; }
  int count() const { return static_cast<int>(reps_.size()); }
  const Vec& rep(int i) const { return reps_[i]; }
  const std::vector<Vec>& reps() const { return reps_; }

  // Whether the reps span the ambient space (bodies are bounded iff so).
  bool spans_ambient(double pivot_rel = 1e-10) const;

 private:
  int dim_;
  std::vector<Vec> reps_;
};

// Positive support numbers paired with a direction set, one per rep.
class SupportVector {
 public:
  SupportVector(DirectionSet dirs, Vec values);

  const DirectionSet& directions() const { return dirs_; }
  const Vec& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  int count() const { return static_cast<int>(values_.size()); }

 private:
  DirectionSet dirs_;
  Vec values_;
};

// Linear subspace given by an orthonormal basis of ambient vectors.
class Subspace {
 public:
  Subspace(int ambient_dim, Mat basis);

  static Subspace span_of(int ambient_dim, const std::vector<Vec>& vectors,
                          double pivot_rel = 1e-10);

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }
  Mat projector() const { return basis_ * basis_.transpose(); }
  Subspace complement() const;

  // Distance-based membership test, relative to |v| for large vectors.
  bool contains(const Vec& v, double tol = 1e-9) const;

 private:
  int ambient_;
  Mat basis_;
};

// One bounding slab side.  sign * reps[dir] is the outward normal; offset is
// the support number of the slab (kept even when the facet is inactive, i.e.
// area == 0).  `vertices` indexes into Polytope::vertices(); for 3-d bodies
// the list is ordered counterclockwise as seen from outside.
struct Facet {
  int dir = -1;
  int sign = +1;
  double offset = 0;
  double area = 0;
  std::vector<int> vertices;
};

class Polytope {
 public:
  // Validating constructor; use build_wulff_body and friends rather than
  // assembling fields by hand.  Checks vertex feasibility, origin symmetry
  // of the vertex set, and the volume/cone-sum identity.
  Polytope(DirectionSet dirs, std::vector<Vec> vertices,
           std::vector<Facet> facets, double volume,
           const Tolerances& tol = {});

  int dim() const { return dirs_.dim(); }
  const DirectionSet& directions() const { return dirs_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  double volume() const { return volume_; }

  // Facet record for rep index i and sign +1 / -1.
  const Facet& facet(int rep, int sign) const {
    return facets_[2 * rep + (sign < 0 ? 1 : 0)];
  }

 private:
  DirectionSet dirs_;
  std::vector<Vec> vertices_;
  std::vector<Facet> facets_;
  double volume_;
};

// Intersection of the symmetric slabs {|x . u_i| <= h_i}.  Exhaustive vertex
// enumeration (O(C(2m, n)) linear solves), recursive facet-area computation,
// volume by an independent simplex decomposition of the boundary.  Inactive
// directions are retained with area 0.  Throws UnboundedBody when the
// directions do not span, DegenerateBody when the volume collapses.
Polytope build_wulff_body(const DirectionSet& dirs, const SupportVector& h,
                          const Tolerances& tol = {});

// Volume and per-rep facet areas of the slab intersection without facet
// ordering or full validation; volume comes from the cone identity.  This is
// the evaluation an optimizer can afford to call thousands of times.
struct WulffEvaluation {
  double volume = 0;
  Vec areas;
};
WulffEvaluation evaluate_wulff(const DirectionSet& dirs, const Vec& h,
                               const Tolerances& tol = {});

// Per-facet cone volumes (h_i * S_i / n) as an even measure on the facet
// normals.  Zero-area directions are dropped.  Total mass equals the volume.
DiscreteMeasure cone_volume_measure(const Polytope& P);

// Masses h_i^(1-p) * S_i.  p = 1 gives facet areas, p = 0 gives n times the
// cone-volume masses.
DiscreteMeasure lp_surface_measure(const Polytope& P, double p);

// Image body phi(P) for invertible phi: directions transform by the inverse
// transpose (renormalized), supports accordingly; the body is then rebuilt so
// facet data stays consistent.  Volume scales by |det phi|.
Polytope apply_linear_map(const Polytope& P, const Mat& phi,
                          const Tolerances& tol = {});

// Gauge evaluations.  radial_eval returns the boundary scale of P along x
// (min over slabs of h_i / |x . u_i|); support_eval the max of x . v over
// vertices.
double radial_eval(const Polytope& P, const Vec& x);
double support_eval(const Polytope& P, const Vec& x);

// Minkowski sum of two bodies living in complementary subspaces.  P and Q are
// given in the intrinsic coordinates of sigma and tau (P.dim() == sigma.dim(),
// Q.dim() == tau.dim()); the result lives in the ambient space, its facet
// normals lying in the orthogonal complements of tau and sigma.
Polytope direct_sum(const Polytope& P, const Subspace& sigma,
                    const Polytope& Q, const Subspace& tau,
                    const Tolerances& tol = {});

}  // namespace logmink
