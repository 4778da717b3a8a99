#include "logmink/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "logmink/errors.hpp"

namespace logmink {

namespace {

// Column-major entrywise order on basis matrices; used only to make the
// record order reproducible across runs.
bool basis_less(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i) {
      if (a(i, j) < b(i, j)) return true;
      if (a(i, j) > b(i, j)) return false;
    }
  return false;
}

double mass_on(const DiscreteMeasure& mu, const Subspace& xi,
               double membership) {
  double m = 0;
  for (const auto& p : mu.support())
    if (xi.contains(p.u, membership)) m += 2.0 * p.mass;
  return m;
}

}  // namespace

ConcentrationReport check_subspace_concentration(const DiscreteMeasure& mu,
                                                 const CheckConfig& cfg) {
  const int n = mu.dim();
  const int m = mu.count();
  if (m == 0) throw EmptyMeasure("check: measure has no support");

  ConcentrationReport rep;
  rep.total_mass = mu.total();
  rep.condition_satisfied = true;
  rep.status = ConcentrationStatus::StrictlySatisfied;
  if (n == 1) return rep;  // no proper nonzero subspaces to check

  const double eq_tol = cfg.equality_rel * rep.total_mass;

  // Candidate subspaces: spans of support subsets of size < n.  Larger
  // subsets never produce new proper spans (pick a spanning subset instead),
  // and a general subspace can be shrunk to the span of the support it
  // contains without losing mass, so this enumeration is exhaustive.
  std::vector<Mat> projs;
  const int kmax = std::min(m, n - 1);
  for (int k = 1; k <= kmax; ++k) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<Vec> sel;
      sel.reserve(k);
      for (int i : idx) sel.push_back(mu.support()[i].u);
      Subspace xi = Subspace::span_of(n, sel, cfg.rank_pivot_rel);
      if (xi.dim() >= 1 && xi.dim() < n) {
        const Mat P = xi.projector();
        bool dup = false;
        for (const Mat& Q : projs)
          if ((P - Q).cwiseAbs().maxCoeff() <= cfg.projector_dedup) {
            dup = true;
            break;
          }
        if (!dup) {
          projs.push_back(P);
          const double mass = mass_on(mu, xi, cfg.membership);
          const double bound = xi.dim() * rep.total_mass / n;
          Verdict v = Verdict::Strict;
          if (mass > bound + eq_tol)
            v = Verdict::Violated;
          else if (std::abs(mass - bound) <= eq_tol)
            v = Verdict::Equality;
          rep.records.push_back({std::move(xi), mass, bound, v});
        }
      }
      int j = k - 1;
      while (j >= 0 && idx[j] == m - k + j) --j;
      if (j < 0) break;
      ++idx[j];
      for (int l = j + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
    }
  }

  std::sort(rep.records.begin(), rep.records.end(),
            [](const ConcentrationRecord& a, const ConcentrationRecord& b) {
              if (a.xi.dim() != b.xi.dim()) return a.xi.dim() < b.xi.dim();
              return basis_less(a.xi.basis(), b.xi.basis());
            });

  bool any_violation = false, any_equality = false;
  for (const ConcentrationRecord& r : rep.records) {
    any_violation |= r.verdict == Verdict::Violated;
    any_equality |= r.verdict == Verdict::Equality;
  }

  // Equality records must come in complementary pairs for a body to exist:
  // the only candidate partner is the span of the rest of the support, which
  // has to meet xi trivially, fill the remaining dimensions, and sit at its
  // own bound.  All mass bounds can hold while this fails, so the pairing is
  // tracked separately from the verdicts.
  for (const ConcentrationRecord& r : rep.records) {
    if (r.verdict != Verdict::Equality) continue;
    std::vector<Vec> rest;
    for (const auto& p : mu.support())
      if (!r.xi.contains(p.u, cfg.membership)) rest.push_back(p.u);
    bool paired = false;
    if (!rest.empty()) {
      Subspace xp = Subspace::span_of(n, rest, cfg.rank_pivot_rel);
      if (r.xi.dim() + xp.dim() == n) {
        std::vector<Vec> all;
        for (int j = 0; j < r.xi.dim(); ++j) all.push_back(r.xi.basis().col(j));
        for (int j = 0; j < xp.dim(); ++j) all.push_back(xp.basis().col(j));
        if (span_rank(n, all, cfg.rank_pivot_rel) == n) {
          const double mass = mass_on(mu, xp, cfg.membership);
          const double bound = xp.dim() * rep.total_mass / n;
          if (std::abs(mass - bound) <= eq_tol) {
            rep.equality_pairs.push_back({r.xi, std::move(xp)});
            paired = true;
          }
        }
      }
    }
    if (!paired) rep.unpaired_equalities.push_back(r.xi);
  }

  if (any_violation)
    rep.status = ConcentrationStatus::Violated;
  else if (any_equality)
    rep.status = ConcentrationStatus::SatisfiedWithEquality;
  rep.condition_satisfied = !any_violation && rep.unpaired_equalities.empty();

  if (any_violation) {
    const ConcentrationRecord* worst = nullptr;
    for (const ConcentrationRecord& r : rep.records)
      if (r.verdict == Verdict::Violated &&
          (!worst || r.mass - r.bound > worst->mass - worst->bound))
        worst = &r;
    rep.witness = worst->xi;
  } else if (!rep.unpaired_equalities.empty()) {
    rep.witness = rep.unpaired_equalities.front();
  } else if (any_equality) {
    rep.witness = rep.equality_pairs.front().xi;
  }
  return rep;
}

DiscreteMeasure restrict_measure(const DiscreteMeasure& mu, const Subspace& xi,
                                 const CheckConfig& cfg) {
  if (xi.ambient_dim() != mu.dim())
    throw PreconditionViolated("restrict: ambient dimension mismatch");
  if (xi.dim() < 1)
    throw PreconditionViolated("restrict: target subspace is trivial");
  std::vector<DiscreteMeasure::Pair> pairs;
  for (const auto& p : mu.support()) {
    if (!xi.contains(p.u, cfg.membership)) continue;
    Vec c = xi.basis().transpose() * p.u;
    c /= c.norm();
    pairs.push_back({std::move(c), p.mass});
  }
  if (pairs.empty())
    throw VectorOutsideSubspace("restrict: no support on the subspace");
  return DiscreteMeasure(xi.dim(), std::move(pairs));
}

AlphaBetaResult alpha_beta(const Vec& alpha) {
  const int n = static_cast<int>(alpha.size());
  if (n < 1) throw PreconditionViolated("alpha_beta: empty input");
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    if (alpha[i] < 0)
      throw PreconditionViolated("alpha_beta: negative weight");
    sum += alpha[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw PreconditionViolated("alpha_beta: weights must sum to 1");

  // lambda is the largest prefix average over the first n-1 positions; the
  // strict bound lambda < 1/n is exactly what keeps t positive.
  double lambda = 0;
  double prefix = 0;
  for (int i = 0; i + 1 < n; ++i) {
    prefix += alpha[i];
    const double avg = prefix / (i + 1);
    if (avg >= 1.0 / n)
      throw PreconditionViolated("alpha_beta: prefix average at or above 1/n");
    lambda = std::max(lambda, avg);
  }
  AlphaBetaResult out;
  out.lambda = lambda;
  out.t = 1.0 - n * lambda;
  out.beta = Vec(n);
  for (int i = 0; i + 1 < n; ++i) out.beta[i] = alpha[i] - lambda;
  out.beta[n - 1] = alpha[n - 1] - lambda - out.t;
  return out;
}

}  // namespace logmink
