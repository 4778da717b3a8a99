#include "logmink/measure.hpp"

#include <cmath>

#include "logmink/errors.hpp"

namespace logmink {

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Pair> support)
    : dim_(dim), support_(std::move(support)) {
  if (dim_ < 1) throw PreconditionViolated("measure: dimension must be >= 1");
  if (support_.empty()) throw EmptyMeasure("measure: empty support");
  double sum = 0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const Pair& p = support_[i];
    if (p.u.size() != dim_)
      throw PreconditionViolated("measure: support vector dimension mismatch");
    if (!(p.mass > 0)) throw ZeroMass("measure: nonpositive mass");
    if (std::abs(p.u.norm() - 1.0) > 1e-12)
      throw PreconditionViolated("measure: support vector is not unit");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(p.u.dot(support_[j].u)) > 1.0 - 1e-12)
        throw PreconditionViolated(
            "measure: two support vectors lie on the same line");
    sum += p.mass;
  }
  total_ = 2.0 * sum;
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  if (!(factor > 0)) throw ZeroMass("measure: scale factor must be positive");
  std::vector<Pair> s = support_;
  for (Pair& p : s) p.mass *= factor;
  return DiscreteMeasure(dim_, std::move(s));
}

DiscreteMeasure measure_from_pairs(
    int dim, const std::vector<std::pair<Vec, double>>& raw) {
  if (dim < 1) throw PreconditionViolated("measure: dimension must be >= 1");
  std::vector<DiscreteMeasure::Pair> merged;
  for (const auto& [v, mass] : raw) {
    if (v.size() != dim)
      throw PreconditionViolated("measure: support vector dimension mismatch");
    const double norm = v.norm();
    if (norm == 0.0) throw ZeroVector("measure: zero support vector");
    if (!(mass > 0)) throw ZeroMass("measure: nonpositive mass");
    // keep already-unit vectors bit-for-bit so write/read cycles are stable
    Vec u = std::abs(norm - 1.0) <= 1e-12 ? v : (v / norm).eval();
    bool absorbed = false;
    for (auto& p : merged) {
      if (std::abs(u.dot(p.u)) > 1.0 - 1e-12) {
        p.mass += mass;  // same line: fold into the first occurrence
        absorbed = true;
        break;
      }
    }
    if (!absorbed) merged.push_back({std::move(u), mass});
  }
  if (merged.empty()) throw EmptyMeasure("measure: empty support");
  return DiscreteMeasure(dim, std::move(merged));
}

FirstMoment check_first_moment(const DiscreteMeasure& mu, double tol) {
  // Summing u and -u with equal weights cancels exactly in floating point,
  // so this is a consistency statement rather than a numeric test; the raw
  // overload below is the interesting diagnostic.
  Vec sum = Vec::Zero(mu.dim());
  for (const auto& p : mu.support()) {
    sum += p.mass * p.u;
    sum += p.mass * (-p.u).eval();
  }
  const double r = sum.norm();
  return {sum, r, r <= tol * mu.total()};
}

FirstMoment check_first_moment_raw(
    int dim, const std::vector<std::pair<Vec, double>>& raw, double tol) {
  Vec sum = Vec::Zero(dim);
  double total = 0;
  for (const auto& [u, mass] : raw) {
    if (u.size() != dim)
      throw PreconditionViolated("first moment: vector dimension mismatch");
    sum += mass * u;
    total += std::abs(mass);
  }
  const double r = sum.norm();
  return {sum, r, r <= tol * total};
}

}  // namespace logmink
