#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "logmink/concentration.hpp"
#include "logmink/errors.hpp"
#include "test_util.hpp"

using namespace logmink;
using testutil::basis_vec;
using testutil::Rng;

namespace {

// Independent mass-on-subspace evaluation for audit tests.
double mass_on_subspace(const DiscreteMeasure& mu, const Subspace& s) {
  double m = 0;
  for (const auto& p : mu.support())
    if (s.contains(p.u)) m += 2.0 * p.mass;
  return m;
}

// The measure whose equality subspaces cannot be paired: three coordinate
// masses plus one on the main diagonal.  span(e3), span(diag) and their join
// all sit exactly at the bound, but the span of the remaining support never
// forms a complement at its own bound.
DiscreteMeasure unpairable_measure() {
  Vec w(3);
  w << 1, 1, 1;
  return measure_from_pairs(3, {{basis_vec(3, 2), 1.0},
                                {basis_vec(3, 0), 0.5},
                                {basis_vec(3, 1), 0.5},
                                {w, 1.0}});
}

}  // namespace

TEST_CASE("cube measure sits at equality everywhere") {
  ConcentrationReport rep =
      check_subspace_concentration(testutil::cube_measure());
  CHECK(rep.status == ConcentrationStatus::SatisfiedWithEquality);
  CHECK(rep.condition_satisfied);
  CHECK(rep.total_mass == doctest::Approx(8.0));
  REQUIRE(rep.records.size() == 6);
  for (int i = 0; i < 3; ++i) CHECK(rep.records[i].xi.dim() == 1);
  for (int i = 3; i < 6; ++i) CHECK(rep.records[i].xi.dim() == 2);
  for (const auto& r : rep.records) {
    CHECK(r.verdict == Verdict::Equality);
    CHECK(r.mass == doctest::Approx(r.bound).epsilon(1e-12));
  }
  CHECK(rep.equality_pairs.size() == 6);
  CHECK(rep.unpaired_equalities.empty());
  for (const auto& pr : rep.equality_pairs) {
    CHECK(pr.xi.dim() + pr.xi_prime.dim() == 3);
    CHECK((pr.xi.basis().transpose() * pr.xi_prime.basis()).norm() < 1e-9);
  }
  REQUIRE(rep.witness.has_value());
}

TEST_CASE("diagonal slab measure is strict") {
  ConcentrationReport rep =
      check_subspace_concentration(testutil::octahedron_measure());
  CHECK(rep.status == ConcentrationStatus::StrictlySatisfied);
  CHECK(rep.condition_satisfied);
  CHECK(rep.records.size() == 10);  // 4 lines + 6 distinct planes
  for (const auto& r : rep.records) {
    CHECK(r.verdict == Verdict::Strict);
    CHECK(r.mass < r.bound);
  }
  CHECK(rep.equality_pairs.empty());
  CHECK_FALSE(rep.witness.has_value());
}

TEST_CASE("overloaded axis is flagged with a witness") {
  ConcentrationReport rep =
      check_subspace_concentration(testutil::violating_measure());
  CHECK(rep.status == ConcentrationStatus::Violated);
  CHECK_FALSE(rep.condition_satisfied);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->dim() == 1);
  CHECK(rep.witness->contains(basis_vec(2, 0)));
  CHECK(mass_on_subspace(testutil::violating_measure(), *rep.witness) ==
        doctest::Approx(3.0));
}

TEST_CASE("equality without a complementary partner is not satisfiable") {
  DiscreteMeasure mu = unpairable_measure();
  CHECK(mu.total() == doctest::Approx(6.0));
  ConcentrationReport rep = check_subspace_concentration(mu);
  CHECK(rep.status == ConcentrationStatus::SatisfiedWithEquality);
  CHECK_FALSE(rep.condition_satisfied);
  CHECK(rep.equality_pairs.empty());
  CHECK(rep.unpaired_equalities.size() == 3);
  REQUIRE(rep.witness.has_value());

  // the three equality subspaces: span(e3), span(diag), their 2-d join
  int dim1 = 0, dim2 = 0;
  for (const auto& s : rep.unpaired_equalities) {
    if (s.dim() == 1) ++dim1;
    if (s.dim() == 2) ++dim2;
    CHECK(mass_on_subspace(mu, s) ==
          doctest::Approx(s.dim() / 3.0 * 6.0).epsilon(1e-12));
  }
  CHECK(dim1 == 2);
  CHECK(dim2 == 1);
}

TEST_CASE("cone-volume measures of random bodies always pass") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(2, 4);
    Polytope P = testutil::random_body(rng, n, rng.uniform_int(n, n + 4));
    ConcentrationReport rep =
        check_subspace_concentration(cone_volume_measure(P));
    CHECK(rep.status != ConcentrationStatus::Violated);
    CHECK(rep.condition_satisfied);
  }
}

TEST_CASE("subset spans dominate arbitrary subspaces") {
  // The checker only inspects spans of support subsets.  Verify on random
  // probes that nothing else attains a larger mass/bound ratio.
  Rng rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(2, 3);
    DiscreteMeasure mu =
        testutil::random_strict_measure(rng, n, rng.uniform_int(n, 5));
    ConcentrationReport rep = check_subspace_concentration(mu);
    double best = 0;
    for (const auto& r : rep.records) best = std::max(best, r.mass / r.bound);
    for (int probe = 0; probe < 200; ++probe) {
      const int d = rng.uniform_int(1, n - 1);
      std::vector<Vec> gens;
      for (int k = 0; k < d; ++k) gens.push_back(testutil::random_unit(rng, n));
      Subspace s = Subspace::span_of(n, gens);
      if (s.dim() < 1 || s.dim() >= n) continue;
      const double ratio = mass_on_subspace(mu, s) /
                           (static_cast<double>(s.dim()) / n * mu.total());
      CHECK(ratio <= best + 1e-9);
    }
  }
}

TEST_CASE("restriction to a coordinate axis") {
  DiscreteMeasure cube = testutil::cube_measure();
  Subspace axis = Subspace::span_of(3, {basis_vec(3, 0)});
  DiscreteMeasure r = restrict_measure(cube, axis);
  CHECK(r.dim() == 1);
  CHECK(r.count() == 1);
  CHECK(std::abs(r.support()[0].u[0]) == doctest::Approx(1.0));
  CHECK(r.support()[0].mass == doctest::Approx(4.0 / 3.0));
  CHECK(r.total() == doctest::Approx(8.0 / 3.0));
}

TEST_CASE("restriction to a coordinate plane") {
  DiscreteMeasure cube = testutil::cube_measure();
  Subspace plane = Subspace::span_of(3, {basis_vec(3, 1), basis_vec(3, 2)});
  DiscreteMeasure r = restrict_measure(cube, plane);
  CHECK(r.dim() == 2);
  CHECK(r.count() == 2);
  CHECK(r.total() == doctest::Approx(16.0 / 3.0));
}

TEST_CASE("restriction preserves mass in rotated coordinates") {
  Vec d(3);
  d << 1, 1, 0;
  DiscreteMeasure mu = measure_from_pairs(
      3, {{d, 2.5}, {basis_vec(3, 2), 1.0}, {basis_vec(3, 0), 0.5}});
  Subspace line = Subspace::span_of(3, {d});
  DiscreteMeasure r = restrict_measure(mu, line);
  CHECK(r.dim() == 1);
  CHECK(r.count() == 1);
  CHECK(r.support()[0].mass == doctest::Approx(2.5));

  Subspace off = Subspace::span_of(3, {(basis_vec(3, 1) - basis_vec(3, 0)).eval()});
  CHECK_THROWS_AS(restrict_measure(mu, off), VectorOutsideSubspace);

  Subspace wrong_ambient = Subspace::span_of(2, {basis_vec(2, 0)});
  CHECK_THROWS_AS(restrict_measure(mu, wrong_ambient), PreconditionViolated);
}

TEST_CASE("weight rebalancing on a worked example") {
  Vec a(3);
  a << 0.1, 0.2, 0.7;
  AlphaBetaResult r = alpha_beta(a);
  CHECK(r.lambda == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(r.t == doctest::Approx(0.55).epsilon(1e-15));
  REQUIRE(r.beta.size() == 3);
  CHECK(r.beta[0] == doctest::Approx(-0.05).epsilon(1e-15));
  CHECK(r.beta[1] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(r.beta[2] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("weight rebalancing invariants on random admissible input") {
  Rng rng(107);
  int produced = 0;
  while (produced < 200) {
    const int n = rng.uniform_int(1, 6);
    Vec a(n);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      a[i] = rng.uniform(0.0, 1.0);
      sum += a[i];
    }
    if (sum <= 0) continue;
    a /= sum;
    std::sort(a.data(), a.data() + n);  // ascending keeps prefixes light
    bool admissible = true;
    double prefix = 0;
    for (int i = 0; i + 1 < n; ++i) {
      prefix += a[i];
      if (prefix / (i + 1) >= 1.0 / n - 1e-9) admissible = false;
    }
    if (!admissible) continue;
    ++produced;

    AlphaBetaResult r = alpha_beta(a);
    CHECK(r.t > 0);
    CHECK(r.t <= 1.0 + 1e-12);
    CHECK(std::abs(r.t - (1.0 - n * r.lambda)) < 1e-12);
    CHECK(std::abs(r.beta.sum()) < 1e-12);
    double run = 0;
    for (int i = 0; i + 1 < n; ++i) {
      run += r.beta[i];
      CHECK(run <= 1e-12);
    }
    for (int i = 0; i + 1 < n; ++i)
      CHECK(std::abs(r.beta[i] - (a[i] - r.lambda)) < 1e-12);
    CHECK(std::abs(r.beta[n - 1] - (a[n - 1] - r.lambda - r.t)) < 1e-12);
  }
}

TEST_CASE("weight rebalancing preconditions") {
  Vec bad(3);
  bad << 0.4, 0.1, 0.5;  // first prefix average 0.4 >= 1/3
  CHECK_THROWS_AS(alpha_beta(bad), PreconditionViolated);

  Vec flat = Vec::Constant(3, 1.0 / 3.0);  // prefix average exactly at 1/n
  CHECK_THROWS_AS(alpha_beta(flat), PreconditionViolated);

  Vec neg(2);
  neg << -0.1, 1.1;
  CHECK_THROWS_AS(alpha_beta(neg), PreconditionViolated);

  Vec off(2);
  off << 0.3, 0.3;
  CHECK_THROWS_AS(alpha_beta(off), PreconditionViolated);

  Vec single(1);
  single << 1.0;
  AlphaBetaResult r = alpha_beta(single);
  CHECK(r.lambda == 0.0);
  CHECK(r.t == 1.0);
  CHECK(std::abs(r.beta[0]) < 1e-15);
}
