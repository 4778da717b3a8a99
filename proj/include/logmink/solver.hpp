#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "logmink/concentration.hpp"
#include "logmink/errors.hpp"
#include "logmink/geometry.hpp"
#include "logmink/measure.hpp"

namespace logmink {

// Variational solver for the even log-Minkowski problem: find an
// origin-symmetric polytope whose cone-volume measure matches a given even
// discrete measure.  Strictly admissible measures go through gradient
// descent on log support values; measures sitting at a subspace mass bound
// are split into two complementary lower-dimensional problems whose solutions
// are lifted and Minkowski-summed.

struct SolveConfig {
  double tol_residual = 1e-8;     // per-direction |achieved - target| / total
  int max_iters = 10000;
  double armijo_c = 1e-4;         // sufficient-decrease constant
  double backtrack_ratio = 0.5;   // step shrink factor
  double divergence_ratio = 1e8;  // h_max / h_min blow-up threshold
  double equality_tol = 1e-9;     // routed into the concentration checker
};

struct TraceRow {
  int iteration;
  double objective;  // scale-invariant merit value at this iterate
  double residual;
  double step;       // accepted step length (0 on the first row)
};

struct ConditionViolated : Error {
  Subspace witness;
  ConditionViolated(const std::string& msg, Subspace w)
      : Error(msg), witness(std::move(w)) {}
};

struct DivergenceDetected : Error {
  std::optional<Subspace> hint;  // most concentrated subspace, when known
  int iterations;
  double anisotropy;
  DivergenceDetected(const std::string& msg, std::optional<Subspace> h,
                     int iters, double aniso)
      : Error(msg), hint(std::move(h)), iterations(iters), anisotropy(aniso) {}
};

struct SolveResult;

// Record of one equality split: the measure was restricted to xi and
// xi_prime, the children solved against a * (restricted measure), and their
// bodies lifted into the orthogonal complements before summing.  r is the
// volume dilation of the oblique lift; a satisfies
// m (n - m) / n^2 * r * a^2 * total = 1.
struct DecompositionNode {
  Subspace xi;
  Subspace xi_prime;
  double a;
  double r;
  std::unique_ptr<SolveResult> left;   // solved in xi coordinates
  std::unique_ptr<SolveResult> right;  // solved in xi_prime coordinates
  Polytope lifted_left;                // child body mapped into the complement of xi_prime
  Polytope lifted_right;               // child body mapped into the complement of xi
  Subspace carrier_left;
  Subspace carrier_right;
};

struct SolveResult {
  enum class Path { Strict, Decomposed };

  Polytope body;             // volume equals the target total mass
  DiscreteMeasure achieved;  // cone-volume measure of `body`
  double residual;           // max per-direction mass error / total
  double objective;          // final log-support functional value
  int iterations;
  Path path;
  std::unique_ptr<DecompositionNode> node;  // set when path == Decomposed
  std::vector<TraceRow> trace;
};

// Integral of log h_P over mu (even extension).  Throws OriginNotInterior if
// the support of P is nonpositive somewhere on supp(mu).
double log_functional(const DiscreteMeasure& mu, const Polytope& P);

// Scale-invariant merit: V(h)^(-1/n) * exp(sum of normalized masses * log h).
// The reps of mu must appear among h's directions.
double m0_functional(const DiscreteMeasure& mu, const SupportVector& h,
                     const Tolerances& tol = {});

// d(volume)/dh_i = 2 * S_i (the pair {u_i, -u_i} moves together).
Vec volume_gradient(const DirectionSet& dirs, const SupportVector& h,
                    const Tolerances& tol = {});

// Gradient descent on y = log h with backtracking line search.  Assumes the
// measure is strictly admissible (the caller routes); detects blow-up via the
// anisotropy ratio and reports the most concentrated subspace as a hint.
SolveResult minimize_strict(const DiscreteMeasure& mu,
                            const SolveConfig& cfg = {});

// Full pipeline: checks the measure, solves strictly admissible inputs by
// descent, splits equality cases recursively, rejects violating measures
// with the offending subspace.
SolveResult solve(const DiscreteMeasure& mu, const SolveConfig& cfg = {});

// Oblique lift-and-sum step: C lives in xi coordinates, Cp in xi_prime
// coordinates; both are mapped into the complementary orthogonal subspaces
// and Minkowski-summed.
Polytope direct_sum_combine(const Polytope& C, const Subspace& xi,
                            const Polytope& Cp, const Subspace& xi_prime,
                            const Tolerances& tol = {});

// Volume dilation of the oblique lift from xi into the orthogonal complement
// of xi_prime (1 when the pair is orthogonal).
double lift_ratio(const Subspace& xi, const Subspace& xi_prime);

// Largest per-direction mass difference between target and achieved, divided
// by the target total.  Directions are matched up to sign; unmatched reps on
// either side count their full mass.
double measure_residual(const DiscreteMeasure& target,
                        const DiscreteMeasure& achieved);

}  // namespace logmink
