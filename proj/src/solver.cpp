#include "logmink/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logmink/errors.hpp"

namespace logmink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DirectionSet directions_of(const DiscreteMeasure& mu) {
  std::vector<Vec> reps;
  reps.reserve(mu.count());
  for (const auto& p : mu.support()) reps.push_back(p.u);
  return DirectionSet(mu.dim(), std::move(reps));
}

// Scale-invariant merit F(y) = -(1/n) log V(e^y) + sum c_i y_i with
// c_i = 2 v_i / |mu|; this is log m0.  Gradient: c_i - 2 h_i S_i / (n V).
struct Evaluation {
  double F = kInf;
  double volume = 0;
  Vec gradient;
  double residual = kInf;  // max_i |v_i/|mu| - h_i S_i/(n V)|
};

Evaluation evaluate_point(const DirectionSet& dirs, const Vec& c, const Vec& y,
                          const Tolerances& tol) {
  Evaluation ev;
  const int n = dirs.dim();
  const Vec h = y.array().exp();
  if (!h.allFinite()) return ev;  // F stays +inf; the line search backs off
  const WulffEvaluation w = evaluate_wulff(dirs, h, tol);
  if (!(w.volume > 0)) return ev;
  ev.volume = w.volume;
  ev.F = -std::log(w.volume) / n + c.dot(y);
  ev.gradient = Vec(dirs.count());
  ev.residual = 0;
  for (int i = 0; i < dirs.count(); ++i) {
    ev.gradient[i] = c[i] - 2.0 * h[i] * w.areas[i] / (n * w.volume);
    ev.residual = std::max(ev.residual, 0.5 * std::abs(ev.gradient[i]));
  }
  return ev;
}

std::optional<Subspace> concentration_hint(const DiscreteMeasure& mu,
                                           const SolveConfig& cfg) {
  CheckConfig ccfg;
  ccfg.equality_rel = cfg.equality_tol;
  try {
    const ConcentrationReport rep = check_subspace_concentration(mu, ccfg);
    const ConcentrationRecord* best = nullptr;
    for (const ConcentrationRecord& r : rep.records)
      if (!best || r.mass / r.bound > best->mass / best->bound) best = &r;
    if (best) return best->xi;
  } catch (const Error&) {
    // the hint is advisory; never mask the divergence report
  }
  return std::nullopt;
}

struct CombineParts {
  Polytope lifted_left;
  Polytope lifted_right;
  Subspace carrier_left;
  Subspace carrier_right;
  Polytope sum;
};

CombineParts combine_parts(const Polytope& C, const Subspace& xi,
                           const Polytope& Cp, const Subspace& xi_prime,
                           const Tolerances& tol) {
  const int n = xi.ambient_dim();
  if (xi_prime.ambient_dim() != n)
    throw NotComplementary("combine: ambient dimensions differ");
  if (xi.dim() + xi_prime.dim() != n)
    throw NotComplementary("combine: dimensions do not add up");
  if (C.dim() != xi.dim() || Cp.dim() != xi_prime.dim())
    throw NotComplementary("combine: body/subspace dimension mismatch");

  // The child solved in xi coordinates is realized inside the orthogonal
  // complement of xi_prime as the preimage of the projection onto xi, and
  // symmetrically.  In orthonormal bases the projection restricted to the
  // carrier is a square matrix; inverting it performs the oblique lift.
  auto lift = [&](const Polytope& body, const Subspace& from,
                  const Subspace& other) {
    Subspace carrier = other.complement();
    const Mat M = from.basis().transpose() * carrier.basis();
    Eigen::FullPivLU<Mat> lu(M);
    if (std::abs(lu.determinant()) < 1e-12)
      throw LiftDegenerate("combine: projection onto the carrier is singular");
    return std::make_pair(apply_linear_map(body, lu.inverse(), tol),
                          std::move(carrier));
  };
  auto [D, carrier_left] = lift(C, xi, xi_prime);
  auto [Dp, carrier_right] = lift(Cp, xi_prime, xi);
  Polytope sum = direct_sum(D, carrier_left, Dp, carrier_right, tol);
  return {std::move(D), std::move(Dp), std::move(carrier_left),
          std::move(carrier_right), std::move(sum)};
}

}  // namespace

double log_functional(const DiscreteMeasure& mu, const Polytope& P) {
  if (P.dim() != mu.dim())
    throw PreconditionViolated("log functional: dimension mismatch");
  double acc = 0;
  for (const auto& p : mu.support()) {
    const double h = support_eval(P, p.u);
    if (!(h > 0))
      throw OriginNotInterior("log functional: nonpositive support value");
    acc += 2.0 * p.mass * std::log(h);
  }
  return acc;
}

double m0_functional(const DiscreteMeasure& mu, const SupportVector& h,
                     const Tolerances& tol) {
  const DirectionSet& dirs = h.directions();
  if (dirs.dim() != mu.dim())
    throw PreconditionViolated("m0: dimension mismatch");
  double expo = 0;
  for (const auto& p : mu.support()) {
    int match = -1;
    for (int j = 0; j < dirs.count() && match < 0; ++j)
      if (std::abs(p.u.dot(dirs.rep(j))) > 1.0 - 1e-9) match = j;
    if (match < 0)
      throw PreconditionViolated("m0: measure direction missing from h");
    expo += 2.0 * p.mass / mu.total() * std::log(h[match]);
  }
  const WulffEvaluation w = evaluate_wulff(dirs, h.values(), tol);
  if (!(w.volume > tol.degenerate_volume))
    throw DegenerateBody("m0: degenerate body");
  return std::pow(w.volume, -1.0 / mu.dim()) * std::exp(expo);
}

Vec volume_gradient(const DirectionSet& dirs, const SupportVector& h,
                    const Tolerances& tol) {
  if (h.count() != dirs.count())
    throw PreconditionViolated("volume gradient: size mismatch");
  const WulffEvaluation w = evaluate_wulff(dirs, h.values(), tol);
  if (!(w.volume > tol.degenerate_volume))
    throw DegenerateBody("volume gradient: degenerate body");
  return 2.0 * w.areas;
}

SolveResult minimize_strict(const DiscreteMeasure& mu,
                            const SolveConfig& cfg) {
  const Tolerances tol;
  const int n = mu.dim();
  const int m = mu.count();
  const DirectionSet dirs = directions_of(mu);
  if (!dirs.spans_ambient())
    throw UnboundedBody("minimize: support does not span the space");

  Vec c(m);
  for (int i = 0; i < m; ++i) c[i] = 2.0 * mu.support()[i].mass / mu.total();

  Vec y = Vec::Zero(m);
  Evaluation cur = evaluate_point(dirs, c, y, tol);
  if (!std::isfinite(cur.F))
    throw DegenerateBody("minimize: degenerate at the initial point");

  std::vector<TraceRow> trace;
  trace.push_back({0, cur.F, cur.residual, 0.0});

  int iters = 0;
  Vec y_prev, g_prev;
  double anisotropy = 1.0;
  bool converged = cur.residual <= cfg.tol_residual;
  while (!converged && iters < cfg.max_iters) {
    // Barzilai-Borwein trial step from the previous accepted pair, clamped;
    // plain 1.0 on the first iteration or when the curvature estimate fails.
    double alpha = 1.0;
    if (iters > 0) {
      const Vec s = y - y_prev;
      const Vec dg = cur.gradient - g_prev;
      const double num = s.dot(dg);
      const double den = dg.dot(dg);
      if (num > 0 && den > 0 && std::isfinite(num) && std::isfinite(den))
        alpha = std::min(std::max(num / den, 1e-10), 1e4);
    }

    const double gg = cur.gradient.squaredNorm();
    const double floor = 1e-13 * (1.0 + std::abs(cur.F));
    bool accepted = false;
    Evaluation next;
    Vec y_next;
    while (alpha >= 1e-16) {
      y_next = y - alpha * cur.gradient;
      next = evaluate_point(dirs, c, y_next, tol);
      if (next.F <= cur.F - cfg.armijo_c * alpha * gg) {
        accepted = true;
        break;
      }
      // Near the minimum the demanded decrease sinks under rounding noise in
      // the volume; accept a non-increasing step instead of stalling.
      if (cfg.armijo_c * alpha * gg <= floor && next.F <= cur.F + floor) {
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack_ratio;
    }
    if (!accepted)
      throw DivergenceDetected("minimize: line search stalled",
                               concentration_hint(mu, cfg), iters, anisotropy);

    y_prev = y;
    g_prev = cur.gradient;
    y = y_next;
    cur = next;
    ++iters;
    trace.push_back({iters, cur.F, cur.residual, alpha});

    anisotropy = std::exp(y.maxCoeff() - y.minCoeff());
    if (anisotropy > cfg.divergence_ratio)
      throw DivergenceDetected("minimize: support numbers blowing up",
                               concentration_hint(mu, cfg), iters, anisotropy);
    converged = cur.residual <= cfg.tol_residual;
  }
  if (!converged)
    throw DivergenceDetected("minimize: iteration budget exhausted",
                             concentration_hint(mu, cfg), iters, anisotropy);

  // Fix the scale: the objective is scale-free, the problem is not.
  const double s = std::pow(mu.total() / cur.volume, 1.0 / n);
  const Vec h_final = (s * y.array().exp()).matrix();
  Polytope body = build_wulff_body(dirs, SupportVector(dirs, h_final), tol);
  DiscreteMeasure achieved = cone_volume_measure(body);

  SolveResult out{std::move(body),
                  std::move(achieved),
                  0.0,
                  0.0,
                  iters,
                  SolveResult::Path::Strict,
                  nullptr,
                  std::move(trace)};
  out.residual = measure_residual(mu, out.achieved);
  out.objective = log_functional(mu, out.body);
  return out;
}

SolveResult solve(const DiscreteMeasure& mu, const SolveConfig& cfg) {
  CheckConfig ccfg;
  ccfg.equality_rel = cfg.equality_tol;
  const ConcentrationReport rep = check_subspace_concentration(mu, ccfg);

  if (rep.status == ConcentrationStatus::Violated)
    throw ConditionViolated("solve: subspace mass bound violated",
                            *rep.witness);
  if (!rep.unpaired_equalities.empty())
    throw NotComplementary(
        "solve: equality subspace has no complementary partner in the "
        "support; no body realizes this measure");
  if (rep.status == ConcentrationStatus::StrictlySatisfied)
    return minimize_strict(mu, cfg);

  // Equality split: restrict to the first reported pair, hand each child the
  // pre-scaled target a * (restricted measure), combine by oblique lift and
  // Minkowski sum.  a is pinned by m (n - m) / n^2 * r * a^2 * |mu| = 1.
  const Tolerances tol;
  const EqualityPair& pair = rep.equality_pairs.front();
  const int n = mu.dim();
  const int md = pair.xi.dim();
  const double r = lift_ratio(pair.xi, pair.xi_prime);
  const double a = n / std::sqrt(md * (n - md) * r * mu.total());

  const DiscreteMeasure left_target =
      restrict_measure(mu, pair.xi, ccfg).scaled(a);
  const DiscreteMeasure right_target =
      restrict_measure(mu, pair.xi_prime, ccfg).scaled(a);

  auto left = std::make_unique<SolveResult>(solve(left_target, cfg));
  auto right = std::make_unique<SolveResult>(solve(right_target, cfg));

  CombineParts parts =
      combine_parts(left->body, pair.xi, right->body, pair.xi_prime, tol);

  auto node = std::make_unique<DecompositionNode>(DecompositionNode{
      pair.xi, pair.xi_prime, a, r, std::move(left), std::move(right),
      std::move(parts.lifted_left), std::move(parts.lifted_right),
      std::move(parts.carrier_left), std::move(parts.carrier_right)});

  const int iters = node->left->iterations + node->right->iterations;
  Polytope body = std::move(parts.sum);
  DiscreteMeasure achieved = cone_volume_measure(body);
  const double residual = measure_residual(mu, achieved);
  const double objective = log_functional(mu, body);
  return SolveResult{std::move(body),
                     std::move(achieved),
                     residual,
                     objective,
                     iters,
                     SolveResult::Path::Decomposed,
                     std::move(node),
                     {}};
}

Polytope direct_sum_combine(const Polytope& C, const Subspace& xi,
                            const Polytope& Cp, const Subspace& xi_prime,
                            const Tolerances& tol) {
  return combine_parts(C, xi, Cp, xi_prime, tol).sum;
}

double lift_ratio(const Subspace& xi, const Subspace& xi_prime) {
  if (xi.ambient_dim() != xi_prime.ambient_dim() ||
      xi.dim() + xi_prime.dim() != xi.ambient_dim())
    throw NotComplementary("lift ratio: subspaces are not complementary");
  const Mat M = xi.basis().transpose() * xi_prime.complement().basis();
  const double det = std::abs(Eigen::FullPivLU<Mat>(M).determinant());
  if (det < 1e-12)
    throw LiftDegenerate("lift ratio: projection determinant vanishes");
  return 1.0 / det;
}

double measure_residual(const DiscreteMeasure& target,
                        const DiscreteMeasure& achieved) {
  if (target.dim() != achieved.dim())
    throw PreconditionViolated("residual: dimension mismatch");
  double worst = 0;
  std::vector<bool> used(achieved.count(), false);
  for (const auto& t : target.support()) {
    double diff = t.mass;  // unmatched reps miss their whole mass
    for (int j = 0; j < achieved.count(); ++j) {
      if (std::abs(t.u.dot(achieved.support()[j].u)) > 1.0 - 1e-9) {
        diff = std::abs(t.mass - achieved.support()[j].mass);
        used[j] = true;
        break;
      }
    }
    worst = std::max(worst, diff);
  }
  for (int j = 0; j < achieved.count(); ++j)
    if (!used[j]) worst = std::max(worst, achieved.support()[j].mass);
  return worst / target.total();
}

}  // namespace logmink
