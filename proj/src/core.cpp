#include "logmink/core.hpp"

#include <stdexcept>

namespace logmink {

namespace {

// Pivoted modified Gram-Schmidt over a working copy of the columns.
// Re-orthogonalizes once per accepted vector to keep the basis orthonormal
// to machine precision even for nearly dependent inputs.
Mat mgs_span(int dim, const std::vector<Vec>& vectors, double pivot_rel) {
  const int k = static_cast<int>(vectors.size());
  Mat work(dim, k);
  for (int j = 0; j < k; ++j) {
    if (vectors[j].size() != dim)
      throw std::invalid_argument("span: vector dimension mismatch");
    work.col(j) = vectors[j];
  }
  double max_norm = 0;
  for (int j = 0; j < k; ++j) max_norm = std::max(max_norm, work.col(j).norm());
  const double floor = pivot_rel * max_norm;

  Mat basis(dim, std::min(dim, k));
  int r = 0;
  std::vector<bool> used(k, false);
  while (r < dim) {
    int best = -1;
    double best_norm = floor;
    for (int j = 0; j < k; ++j) {
      if (used[j]) continue;
      const double nj = work.col(j).norm();
      if (nj > best_norm) {
        best_norm = nj;
        best = j;
      }
    }
    if (best < 0) break;
    used[best] = true;
    Vec q = work.col(best);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < r; ++i) q -= basis.col(i).dot(q) * basis.col(i);
    const double nq = q.norm();
    if (nq <= floor) continue;
    basis.col(r++) = q / nq;
    for (int j = 0; j < k; ++j) {
      if (used[j]) continue;
      work.col(j) -= basis.col(r - 1).dot(work.col(j)) * basis.col(r - 1);
    }
  }
  return basis.leftCols(r);
}

}  // namespace

Mat orthonormal_span(int dim, const std::vector<Vec>& vectors,
                     double pivot_rel) {
  return mgs_span(dim, vectors, pivot_rel);
}

int span_rank(int dim, const std::vector<Vec>& vectors, double pivot_rel) {
  return static_cast<int>(mgs_span(dim, vectors, pivot_rel).cols());
}

Mat orthonormal_complement(const Mat& basis, double pivot_rel) {
  const int n = static_cast<int>(basis.rows());
  const int m = static_cast<int>(basis.cols());
  Mat out(n, n - m);
  int r = 0;
  // Project the coordinate axes off the given basis and orthonormalize what
  // survives; axes are tried in norm order so the result is deterministic.
  Mat resid = Mat::Identity(n, n) - basis * basis.transpose();
  std::vector<bool> used(n, false);
  while (r < n - m) {
    int best = -1;
    double best_norm = pivot_rel;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double nj = resid.col(j).norm();
      if (nj > best_norm) {
        best_norm = nj;
        best = j;
      }
    }
    if (best < 0)
      throw std::runtime_error("complement: basis is not orthonormal");
    used[best] = true;
    Vec q = resid.col(best);
    for (int pass = 0; pass < 2; ++pass) {
      q -= basis * (basis.transpose() * q);
      for (int i = 0; i < r; ++i) q -= out.col(i).dot(q) * out.col(i);
    }
    const double nq = q.norm();
    if (nq <= pivot_rel) continue;
    out.col(r++) = q / nq;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      resid.col(j) -= out.col(r - 1).dot(resid.col(j)) * out.col(r - 1);
    }
  }
  return out;
}

}  // namespace logmink
