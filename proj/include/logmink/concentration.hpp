#pragma once

#include <optional>
#include <vector>

#include "logmink/geometry.hpp"
#include "logmink/measure.hpp"

namespace logmink {

struct CheckConfig {
  double equality_rel = 1e-9;    // x total mass: band around the bound counted as equality
  double projector_dedup = 1e-9; // subspaces with closer projectors are merged
  double rank_pivot_rel = 1e-10; // rank decisions when spanning subsets
  double membership = 1e-9;      // distance of a rep to a subspace to count its mass
};

enum class Verdict { Strict, Equality, Violated };

struct ConcentrationRecord {
  Subspace xi;
  double mass;   // even-extended mass carried on xi
  double bound;  // (dim xi / n) * total mass
  Verdict verdict;
};

struct EqualityPair {
  Subspace xi;
  Subspace xi_prime;  // complementary subspace carrying the remaining mass
};

enum class ConcentrationStatus { StrictlySatisfied, SatisfiedWithEquality, Violated };

// Outcome of the subspace mass checks.  `records` lists every distinct
// subspace spanned by support vectors (the only candidates that matter for a
// discrete measure), sorted by dimension then projector order.  `status` is
// Violated exactly when some record has mass > bound + tol.  An equality
// record is "paired" when the span of the remaining support is complementary
// and itself sits at its bound; unpaired equalities mean no body can realize
// the measure even though no single inequality fails, so
// `condition_satisfied` is false in that case too.
struct ConcentrationReport {
  ConcentrationStatus status;
  double total_mass;
  std::vector<ConcentrationRecord> records;
  std::vector<EqualityPair> equality_pairs;
  std::vector<Subspace> unpaired_equalities;
  std::optional<Subspace> witness;  // max-ratio violator, or first equality subspace
  bool condition_satisfied;
};

// Verifies the mass bound mass(xi) <= (dim xi / n) * total over every
// subspace spanned by support vectors.  Spans of subsets of size <= n-1 are
// exhaustive for discrete measures: any subspace can be replaced by the span
// of the support vectors it contains without changing its mass or raising
// its dimension.
ConcentrationReport check_subspace_concentration(const DiscreteMeasure& mu,
                                                 const CheckConfig& cfg = {});

// Restriction of mu to the reps lying on xi (within cfg.membership),
// re-expressed in the intrinsic coordinates of xi.  Mass off xi is dropped;
// throws VectorOutsideSubspace when no rep lies on xi at all.
DiscreteMeasure restrict_measure(const DiscreteMeasure& mu, const Subspace& xi,
                                 const CheckConfig& cfg = {});

// Weight rebalancing used by the blow-up analysis of the minimization: given
// nonnegative alpha summing to 1 whose prefix averages stay strictly below
// 1/n, returns shifted weights beta with nonpositive prefix sums and zero
// total, together with the level lambda (the largest prefix average) and the
// gap t = 1 - n * lambda in (0, 1].
struct AlphaBetaResult {
  double t;
  double lambda;
  Vec beta;
};

AlphaBetaResult alpha_beta(const Vec& alpha);

}  // namespace logmink
