#pragma once

#include <Eigen/Dense>
#include <vector>

namespace logmink {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Numeric knobs for the polytope kernel.  The defaults are the values the
// test suites pin; override individual fields per call when experimenting.
struct Tolerances {
  double unit_norm = 1e-12;          // |norm(u) - 1| allowed for direction reps
  double antipodal_dup = 1e-12;      // |u.v| > 1 - this  =>  duplicate pair
  double vertex_feasibility = 1e-9;  // constraint slack when filtering candidate vertices
  double vertex_dedup = 1e-9;        // absolute, in the h_max-normalized frame
  double facet_activity = 1e-9;      // vertex-on-hyperplane test
  double facet_area_floor = 1e-12;   // x diameter^(n-1): smaller facets count as absent
  double degenerate_volume = 1e-12;  // bodies below this volume are rejected
  double singular_det = 1e-12;       // linear maps below this |det| are rejected
  double rank_pivot_rel = 1e-10;     // x largest column norm, for rank decisions
  double volume_identity_rel = 1e-9; // cross-check of volume vs. facet cone sum
};

// Orthonormal basis of span(vectors) via pivoted modified Gram-Schmidt.
// Columns are selected greedily by largest remaining norm; a column is kept
// only while its residual norm exceeds pivot_rel times the largest input
// column norm.  Returns an n x r matrix, r = rank.
Mat orthonormal_span(int dim, const std::vector<Vec>& vectors,
                     double pivot_rel = 1e-10);

int span_rank(int dim, const std::vector<Vec>& vectors,
              double pivot_rel = 1e-10);

// Orthonormal basis of the orthogonal complement of the column space of
// `basis` (which must itself have orthonormal columns).
Mat orthonormal_complement(const Mat& basis, double pivot_rel = 1e-10);

}  // namespace logmink
