#include "logmink/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "logmink/errors.hpp"

namespace logmink {

namespace {

// Fixed-capacity matrix types for the enumeration inner loop: dimensions are
// capped at 8, so stack storage avoids per-candidate allocations.
constexpr int kMaxDim = 8;
using MatN = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::ColMajor, kMaxDim, kMaxDim>;
using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor,
                           kMaxDim, 1>;

double binomial_estimate(int k, int r) {
  double v = 1;
  for (int i = 0; i < r; ++i) v *= double(k - i) / double(i + 1);
  return v;
}

// ---------------------------------------------------------------------------
// Convex-cell helpers.
//
// A cell is a full-dimensional convex polytope handed around as (points,
// bounding halfspaces); the points are exactly its vertices.  Facet structure
// is recovered by grouping points on constraint hyperplanes, which is cheap
// and exact here because every cell we ever touch was produced from explicit
// halfspace data.

struct HalfSpace {
  Vec a;     // unit outward normal
  double b;  // a . y <= b
};

bool same_hyperplane(const HalfSpace& p, const HalfSpace& q, double tol) {
  const double d = p.a.dot(q.a);
  if (d > 1.0 - 1e-12) return std::abs(p.b - q.b) <= tol;
  if (d < -(1.0 - 1e-12)) return std::abs(p.b + q.b) <= tol;
  return false;
}

struct FacetGroup {
  HalfSpace plane;
  std::vector<int> active;  // local point indices on the plane
};

std::vector<FacetGroup> cell_facets(const std::vector<Vec>& pts,
                                    const std::vector<HalfSpace>& cons,
                                    int d, double tol) {
  std::vector<FacetGroup> groups;
  for (const HalfSpace& c : cons) {
    bool dup = false;
    for (const FacetGroup& g : groups)
      if (same_hyperplane(g.plane, c, tol)) {
        dup = true;
        break;
      }
    if (dup) continue;
    FacetGroup g;
    g.plane = c;
    for (int k = 0; k < static_cast<int>(pts.size()); ++k)
      if (std::abs(c.a.dot(pts[k]) - c.b) <= tol) g.active.push_back(k);
    if (static_cast<int>(g.active.size()) >= d) groups.push_back(std::move(g));
  }
  return groups;
}

struct SubCell {
  std::vector<Vec> pts;       // coordinates inside the facet hyperplane
  std::vector<int> back;      // local facet index -> parent point index
  std::vector<HalfSpace> cons;
};

SubCell make_subcell(const std::vector<Vec>& pts,
                     const std::vector<HalfSpace>& cons,
                     const FacetGroup& g, double tol) {
  const int d = static_cast<int>(g.plane.a.size());
  Mat normal(d, 1);
  normal.col(0) = g.plane.a;
  const Mat B = orthonormal_complement(normal);  // d x (d-1)
  const Vec x0 = g.plane.b * g.plane.a;

  SubCell sub;
  sub.back = g.active;
  sub.pts.reserve(g.active.size());
  for (int k : g.active) sub.pts.push_back(B.transpose() * (pts[k] - x0));
  for (const HalfSpace& c : cons) {
    if (same_hyperplane(c, g.plane, tol)) continue;
    Vec a = B.transpose() * c.a;
    const double na = a.norm();
    if (na <= 1e-9) continue;  // parallel to the facet plane
    sub.cons.push_back({a / na, (c.b - c.a.dot(x0)) / na});
  }
  return sub;
}

// Area of a convex polygon given its vertices in any order.
double polygon_area(const std::vector<Vec>& pts) {
  const int k = static_cast<int>(pts.size());
  if (k < 3) return 0;
  Vec c = Vec::Zero(2);
  for (const Vec& p : pts) c += p;
  c /= k;
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> ang(k);
  for (int i = 0; i < k; ++i)
    ang[i] = std::atan2(pts[i][1] - c[1], pts[i][0] - c[0]);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return ang[i] < ang[j]; });
  double twice = 0;
  for (int i = 0; i < k; ++i) {
    const Vec& p = pts[order[i]];
    const Vec& q = pts[order[(i + 1) % k]];
    twice += p[0] * q[1] - p[1] * q[0];
  }
  return 0.5 * std::abs(twice);
}

// d-dimensional measure of the cell.  Base cases: a point counts 1 (so that
// 1-d bodies get endpoint "facets" of measure 1), a segment its length, a
// polygon its shoelace area; above that, pyramids over the cell's own facets.
double cell_measure(const std::vector<Vec>& pts,
                    const std::vector<HalfSpace>& cons, int d, double tol) {
  if (pts.empty()) return 0;
  if (d == 0) return 1.0;
  if (d == 1) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const Vec& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return hi - lo;
  }
  if (d == 2) return polygon_area(pts);

  Vec c = Vec::Zero(d);
  for (const Vec& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double total = 0;
  for (const FacetGroup& g : cell_facets(pts, cons, d, tol)) {
    const SubCell sub = make_subcell(pts, cons, g, tol);
    const double m = cell_measure(sub.pts, sub.cons, d - 1, tol);
    total += m * (g.plane.b - g.plane.a.dot(c));
  }
  return total / d;
}

// Simplicial decomposition with global vertex ids, fanned from the first
// point of each (sub)cell.  Used for the volume so that the stored value is
// independent of the facet-area pipeline above.
void simplices_from_groups(const std::vector<Vec>& pts,
                           const std::vector<int>& ids,
                           const std::vector<HalfSpace>& cons,
                           const std::vector<FacetGroup>& groups, int d,
                           double tol,
                           std::vector<std::vector<int>>& out);

void cell_simplices(const std::vector<Vec>& pts, const std::vector<int>& ids,
                    const std::vector<HalfSpace>& cons, int d, double tol,
                    std::vector<std::vector<int>>& out) {
  if (pts.empty()) return;
  if (d == 0) {
    out.push_back({ids[0]});
    return;
  }
  if (d == 1) {
    int lo = 0, hi = 0;
    for (int k = 1; k < static_cast<int>(pts.size()); ++k) {
      if (pts[k][0] < pts[lo][0]) lo = k;
      if (pts[k][0] > pts[hi][0]) hi = k;
    }
    if (lo != hi) out.push_back({ids[lo], ids[hi]});
    return;
  }
  simplices_from_groups(pts, ids, cons, cell_facets(pts, cons, d, tol), d,
                        tol, out);
}

void simplices_from_groups(const std::vector<Vec>& pts,
                           const std::vector<int>& ids,
                           const std::vector<HalfSpace>& cons,
                           const std::vector<FacetGroup>& groups, int d,
                           double tol,
                           std::vector<std::vector<int>>& out) {
  for (const FacetGroup& g : groups) {
    if (static_cast<int>(g.active.size()) < d) continue;
    if (std::find(g.active.begin(), g.active.end(), 0) != g.active.end())
      continue;  // pyramids from pts[0]: skip facets through the apex
    const SubCell sub = make_subcell(pts, cons, g, tol);
    std::vector<int> sub_ids(sub.back.size());
    for (std::size_t k = 0; k < sub.back.size(); ++k)
      sub_ids[k] = ids[sub.back[k]];
    std::vector<std::vector<int>> faces;
    cell_simplices(sub.pts, sub_ids, sub.cons, d - 1, tol, faces);
    for (std::vector<int>& s : faces) {
      s.push_back(ids[0]);
      out.push_back(std::move(s));
    }
  }
}

double volume_from_simplices(const std::vector<Vec>& verts,
                             const std::vector<std::vector<int>>& simplices,
                             int n) {
  double factorial = 1;
  for (int i = 2; i <= n; ++i) factorial *= i;
  double vol = 0;
  MatN E(n, n);
  for (const std::vector<int>& s : simplices) {
    for (int j = 0; j < n; ++j) E.col(j) = verts[s[j + 1]] - verts[s[0]];
    vol += std::abs(E.determinant());
  }
  return vol / factorial;
}

// Deterministic facet-vertex ordering: 3-d facets counterclockwise from
// outside, edges by position, anything higher by index.
std::vector<int> order_facet(const std::vector<Vec>& verts,
                             std::vector<int> ids, const Vec& normal, int n) {
  if (ids.size() <= 1) return ids;
  if (n == 2) {
    Vec t(2);
    t << -normal[1], normal[0];
    std::sort(ids.begin(), ids.end(), [&](int i, int j) {
      return verts[i].dot(t) < verts[j].dot(t);
    });
    return ids;
  }
  if (n == 3) {
    int axis = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(normal[i]) < std::abs(normal[axis])) axis = i;
    Vec e = Vec::Zero(3);
    e[axis] = 1;
    Vec b1(3), b2(3);
    b1 << normal[1] * e[2] - normal[2] * e[1],
        normal[2] * e[0] - normal[0] * e[2],
        normal[0] * e[1] - normal[1] * e[0];
    b1 = -b1;  // e x normal, so that b1 x b2 points along the normal
    b1 /= b1.norm();
    b2 << normal[1] * b1[2] - normal[2] * b1[1],
        normal[2] * b1[0] - normal[0] * b1[2],
        normal[0] * b1[1] - normal[1] * b1[0];
    Vec c = Vec::Zero(3);
    for (int i : ids) c += verts[i];
    c /= static_cast<double>(ids.size());
    std::vector<double> ang(verts.size());
    for (int i : ids)
      ang[i] = std::atan2((verts[i] - c).dot(b2), (verts[i] - c).dot(b1));
    std::sort(ids.begin(), ids.end(),
              [&](int i, int j) { return ang[i] < ang[j]; });
    return ids;
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Result of the shared enumeration pass, in the h_max-normalized frame.
struct WulffScratch {
  double scale = 1;
  Vec hs;                                 // normalized supports
  std::vector<Vec> verts;                 // exact +/- pairs
  std::vector<int> neg;                   // index of the mirrored vertex
  std::vector<std::vector<int>> active;   // per rep, + sign
  Vec areas;                              // per rep, normalized frame
};

WulffScratch wulff_core(const DirectionSet& dirs, const Vec& hvec,
                        const Tolerances& tol) {
  const int n = dirs.dim();
  const int m = dirs.count();
  if (n > kMaxDim)
    throw PreconditionViolated("wulff: dimension above supported bound (8)");
  if (!dirs.spans_ambient(tol.rank_pivot_rel))
    throw UnboundedBody("wulff: directions do not span the space");
  for (int i = 0; i < m; ++i)
    if (!(hvec[i] > 0))
      throw OriginNotInterior("wulff: nonpositive support number");
  if (binomial_estimate(2 * m, n) > 5e7)
    throw PreconditionViolated(
        "wulff: direction set too large for exhaustive enumeration");

  WulffScratch S;
  S.scale = hvec.maxCoeff();
  S.hs = hvec / S.scale;

  Mat U(n, m);
  for (int i = 0; i < m; ++i) U.col(i) = dirs.rep(i);

  // Candidate vertices: solve every n-subset of the 2m slab hyperplanes
  // (sign = k & 1, rep = k >> 1), keep feasible solutions, insert exact
  // mirror pairs so downstream symmetry is bit-true.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  MatN A(n, n);
  VecN b(n), x(n), w(m);
  const int K = 2 * m;
  bool done = n > K;
  while (!done) {
    bool skip = false;
    for (int j = 0; j + 1 < n && !skip; ++j)
      if ((idx[j] >> 1) == (idx[j + 1] >> 1)) skip = true;
    if (!skip) {
      for (int j = 0; j < n; ++j) {
        const int k = idx[j];
        const double s = (k & 1) ? -1.0 : 1.0;
        A.row(j) = s * U.col(k >> 1).transpose();
        b[j] = S.hs[k >> 1];
      }
      Eigen::FullPivLU<MatN> lu(A);
      if (lu.isInvertible()) {
        x = lu.solve(b);
        if ((A * x - b).cwiseAbs().maxCoeff() <= tol.vertex_feasibility) {
          w = U.transpose() * x;
          bool feasible = true;
          for (int i = 0; i < m && feasible; ++i)
            if (std::abs(w[i]) > S.hs[i] + tol.vertex_feasibility)
              feasible = false;
          if (feasible) {
            bool dup = false;
            for (const Vec& v : S.verts) {
              if ((v - x).cwiseAbs().maxCoeff() <= tol.vertex_dedup ||
                  (v + x).cwiseAbs().maxCoeff() <= tol.vertex_dedup) {
                dup = true;
                break;
              }
            }
            if (!dup) {
              const int id = static_cast<int>(S.verts.size());
              S.verts.push_back(x);
              S.verts.push_back(-x);
              S.neg.push_back(id + 1);
              S.neg.push_back(id);
            }
          }
        }
      }
    }
    // advance the combination
    int j = n - 1;
    while (j >= 0 && idx[j] == K - n + j) --j;
    if (j < 0) {
      done = true;
    } else {
      ++idx[j];
      for (int l = j + 1; l < n; ++l) idx[l] = idx[l - 1] + 1;
    }
  }

  if (S.verts.empty()) throw DegenerateBody("wulff: no vertices found");

  // Facet activity and areas for the + side; the - side is an exact mirror.
  std::vector<HalfSpace> cons;
  cons.reserve(2 * m);
  for (int i = 0; i < m; ++i) {
    cons.push_back({dirs.rep(i), S.hs[i]});
    cons.push_back({-dirs.rep(i), S.hs[i]});
  }
  S.active.resize(m);
  S.areas = Vec::Zero(m);
  double max_norm = 0;
  for (const Vec& v : S.verts) max_norm = std::max(max_norm, v.norm());
  const double area_floor =
      tol.facet_area_floor * std::pow(2.0 * max_norm, n - 1);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < static_cast<int>(S.verts.size()); ++k)
      if (std::abs(S.verts[k].dot(dirs.rep(i)) - S.hs[i]) <=
          tol.facet_activity)
        S.active[i].push_back(k);
    if (static_cast<int>(S.active[i].size()) < n) continue;
    FacetGroup g{cons[2 * i], S.active[i]};
    const SubCell sub = make_subcell(S.verts, cons, g, tol.facet_activity);
    double area =
        cell_measure(sub.pts, sub.cons, n - 1, tol.facet_activity);
    if (area < area_floor) area = 0;
    S.areas[i] = area;
  }
  return S;
}

std::vector<HalfSpace> extended_constraints(const DirectionSet& dirs,
                                            const Vec& hs) {
  std::vector<HalfSpace> cons;
  cons.reserve(2 * dirs.count());
  for (int i = 0; i < dirs.count(); ++i) {
    cons.push_back({dirs.rep(i), hs[i]});
    cons.push_back({-dirs.rep(i), hs[i]});
  }
  return cons;
}

}  // namespace

// ---------------------------------------------------------------------------
// DirectionSet / SupportVector / Subspace

DirectionSet::DirectionSet(int dim, std::vector<Vec> reps,
                           const Tolerances& tol)
    : dim_(dim), reps_(std::move(reps)) {
  if (dim_ < 1) throw PreconditionViolated("directions: dimension must be >= 1");
  if (reps_.empty()) throw PreconditionViolated("directions: empty set");
  for (std::size_t i = 0; i < reps_.size(); ++i) {
    if (reps_[i].size() != dim_)
      throw PreconditionViolated("directions: vector dimension mismatch");
    if (std::abs(reps_[i].norm() - 1.0) > tol.unit_norm)
      throw PreconditionViolated("directions: representative is not unit");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(reps_[i].dot(reps_[j])) > 1.0 - tol.antipodal_dup)
        throw PreconditionViolated(
            "directions: two representatives lie on the same line");
  }
}

DirectionSet DirectionSet::normalized(int dim, std::vector<Vec> raw,
                                      const Tolerances& tol) {
  for (Vec& v : raw) {
    const double n = v.norm();
    if (n == 0.0) throw ZeroDirection("directions: zero vector");
    // leave near-unit input untouched so parsed files rebuild bit-for-bit
    if (std::abs(n - 1.0) > tol.unit_norm) v /= n;
  }
  return DirectionSet(dim, std::move(raw), tol);
}

bool DirectionSet::spans_ambient(double pivot_rel) const {
  return span_rank(dim_, reps_, pivot_rel) == dim_;
}

SupportVector::SupportVector(DirectionSet dirs, Vec values)
    : dirs_(std::move(dirs)), values_(std::move(values)) {
  if (values_.size() != dirs_.count())
    throw PreconditionViolated("support: one value per direction required");
  for (int i = 0; i < values_.size(); ++i)
    if (!(values_[i] > 0))
      throw OriginNotInterior("support: values must be positive");
}

Subspace::Subspace(int ambient_dim, Mat basis)
    : ambient_(ambient_dim), basis_(std::move(basis)) {
  if (ambient_ < 1)
    throw PreconditionViolated("subspace: ambient dimension must be >= 1");
  if (basis_.rows() != ambient_ || basis_.cols() > ambient_)
    throw PreconditionViolated("subspace: basis shape mismatch");
  const Mat gram = basis_.transpose() * basis_;
  if ((gram - Mat::Identity(basis_.cols(), basis_.cols()))
          .cwiseAbs()
          .maxCoeff() > 1e-10)
    throw PreconditionViolated("subspace: basis is not orthonormal");
}

Subspace Subspace::span_of(int ambient_dim, const std::vector<Vec>& vectors,
                           double pivot_rel) {
  return Subspace(ambient_dim, orthonormal_span(ambient_dim, vectors, pivot_rel));
}

Subspace Subspace::complement() const {
  return Subspace(ambient_, orthonormal_complement(basis_));
}

bool Subspace::contains(const Vec& v, double tol) const {
  if (v.size() != ambient_)
    throw PreconditionViolated("subspace: vector dimension mismatch");
  const Vec r = v - basis_ * (basis_.transpose() * v);
  return r.norm() <= tol * std::max(1.0, v.norm());
}

// ---------------------------------------------------------------------------
// Polytope

Polytope::Polytope(DirectionSet dirs, std::vector<Vec> vertices,
                   std::vector<Facet> facets, double volume,
                   const Tolerances& tol)
    : dirs_(std::move(dirs)),
      vertices_(std::move(vertices)),
      facets_(std::move(facets)),
      volume_(volume) {
  const int n = dirs_.dim();
  const int m = dirs_.count();
  if (static_cast<int>(facets_.size()) != 2 * m)
    throw PreconditionViolated("polytope: expected one facet record per slab side");
  if (vertices_.empty()) throw DegenerateBody("polytope: no vertices");
  if (!(volume_ > tol.degenerate_volume))
    throw DegenerateBody("polytope: volume below degeneracy floor");

  double h_max = 0;
  for (const Facet& f : facets_) h_max = std::max(h_max, std::abs(f.offset));
  const double slack = tol.vertex_feasibility * std::max(1.0, h_max);
  for (const Vec& v : vertices_) {
    if (v.size() != n)
      throw PreconditionViolated("polytope: vertex dimension mismatch");
    for (int i = 0; i < m; ++i)
      if (std::abs(v.dot(dirs_.rep(i))) > facets_[2 * i].offset + slack)
        throw PreconditionViolated("polytope: vertex violates a slab");
  }
  for (const Vec& v : vertices_) {
    bool mirrored = false;
    for (const Vec& w : vertices_)
      if ((v + w).cwiseAbs().maxCoeff() <= slack) {
        mirrored = true;
        break;
      }
    if (!mirrored)
      throw PreconditionViolated("polytope: vertex set is not origin-symmetric");
  }
  double cone_sum = 0;
  for (const Facet& f : facets_) cone_sum += f.offset * f.area;
  cone_sum /= n;
  if (std::abs(cone_sum - volume_) > tol.volume_identity_rel * volume_)
    throw PreconditionViolated(
        "polytope: volume does not match the facet cone sum");
}

// ---------------------------------------------------------------------------
// Construction and evaluation

WulffEvaluation evaluate_wulff(const DirectionSet& dirs, const Vec& h,
                               const Tolerances& tol) {
  const WulffScratch S = wulff_core(dirs, h, tol);
  const int n = dirs.dim();
  const double sn1 = std::pow(S.scale, n - 1);
  WulffEvaluation ev;
  ev.areas = S.areas * sn1;
  double v = 0;
  for (int i = 0; i < dirs.count(); ++i) v += S.hs[i] * S.areas[i];
  ev.volume = 2.0 * v / n * std::pow(S.scale, n);
  return ev;
}

Polytope build_wulff_body(const DirectionSet& dirs, const SupportVector& h,
                          const Tolerances& tol) {
  if (h.count() != dirs.count() || h.directions().dim() != dirs.dim())
    throw PreconditionViolated("wulff: support/direction size mismatch");
  const int n = dirs.dim();
  const int m = dirs.count();
  const WulffScratch S = wulff_core(dirs, h.values(), tol);

  // Volume by simplices fanned from the first vertex; this deliberately does
  // not reuse the facet areas, so the stored volume cross-checks them.
  const std::vector<HalfSpace> cons = extended_constraints(dirs, S.hs);
  std::vector<FacetGroup> groups;
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(S.active[i].size()) < n) continue;
    groups.push_back({cons[2 * i], S.active[i]});
    std::vector<int> mirrored;
    mirrored.reserve(S.active[i].size());
    for (int k : S.active[i]) mirrored.push_back(S.neg[k]);
    groups.push_back({cons[2 * i + 1], std::move(mirrored)});
  }
  std::vector<int> ids(S.verts.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<std::vector<int>> simplices;
  simplices_from_groups(S.verts, ids, cons, groups, n, tol.facet_activity,
                        simplices);
  const double volume =
      volume_from_simplices(S.verts, simplices, n) * std::pow(S.scale, n);
  if (!(volume > tol.degenerate_volume))
    throw DegenerateBody("wulff: volume below degeneracy floor");

  std::vector<Vec> verts;
  verts.reserve(S.verts.size());
  for (const Vec& v : S.verts) verts.push_back(v * S.scale);

  const double sn1 = std::pow(S.scale, n - 1);
  std::vector<Facet> facets(2 * m);
  for (int i = 0; i < m; ++i) {
    std::vector<int> mirrored;
    mirrored.reserve(S.active[i].size());
    for (int k : S.active[i]) mirrored.push_back(S.neg[k]);
    Facet& plus = facets[2 * i];
    plus.dir = i;
    plus.sign = +1;
    plus.offset = h[i];
    plus.area = S.areas[i] * sn1;
    plus.vertices = order_facet(verts, S.active[i], dirs.rep(i), n);
    Facet& minus = facets[2 * i + 1];
    minus.dir = i;
    minus.sign = -1;
    minus.offset = h[i];
    minus.area = plus.area;
    minus.vertices = order_facet(verts, mirrored, (-dirs.rep(i)).eval(), n);
  }
  return Polytope(dirs, std::move(verts), std::move(facets), volume, tol);
}

DiscreteMeasure cone_volume_measure(const Polytope& P) {
  const int n = P.dim();
  std::vector<DiscreteMeasure::Pair> pairs;
  for (int i = 0; i < P.directions().count(); ++i) {
    const Facet& f = P.facet(i, +1);
    if (!(f.offset > 0))
      throw OriginNotInterior("cone volumes: nonpositive support number");
    if (f.area == 0) continue;
    pairs.push_back({P.directions().rep(i), f.offset * f.area / n});
  }
  return DiscreteMeasure(n, std::move(pairs));
}

DiscreteMeasure lp_surface_measure(const Polytope& P, double p) {
  std::vector<DiscreteMeasure::Pair> pairs;
  for (int i = 0; i < P.directions().count(); ++i) {
    const Facet& f = P.facet(i, +1);
    if (!(f.offset > 0))
      throw OriginNotInterior("surface measure: nonpositive support number");
    if (f.area == 0) continue;
    pairs.push_back({P.directions().rep(i), std::pow(f.offset, 1.0 - p) * f.area});
  }
  return DiscreteMeasure(P.dim(), std::move(pairs));
}

Polytope apply_linear_map(const Polytope& P, const Mat& phi,
                          const Tolerances& tol) {
  const int n = P.dim();
  if (phi.rows() != n || phi.cols() != n)
    throw PreconditionViolated("linear map: shape mismatch");
  Eigen::FullPivLU<Mat> lu(phi);
  if (std::abs(lu.determinant()) <= tol.singular_det)
    throw SingularMap("linear map: determinant below singularity floor");
  const Mat phi_inv_t = lu.inverse().transpose();

  // Slabs transform contravariantly: x in phi(P) iff phi^-1 x in P, so the
  // normal u_i becomes phi^-T u_i (renormalized) and the support number
  // divides by the stretch.
  std::vector<Vec> reps;
  Vec h(P.directions().count());
  for (int i = 0; i < P.directions().count(); ++i) {
    Vec w = phi_inv_t * P.directions().rep(i);
    const double nw = w.norm();
    if (nw == 0.0) throw SingularMap("linear map: direction collapsed");
    reps.push_back(w / nw);
    h[i] = P.facet(i, +1).offset / nw;
  }
  DirectionSet dirs(n, std::move(reps), tol);
  return build_wulff_body(dirs, SupportVector(dirs, std::move(h)), tol);
}

double radial_eval(const Polytope& P, const Vec& x) {
  if (x.size() != P.dim())
    throw PreconditionViolated("radial: vector dimension mismatch");
  if (x.norm() == 0.0) throw ZeroDirection("radial: zero direction");
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < P.directions().count(); ++i) {
    const double t = std::abs(x.dot(P.directions().rep(i)));
    if (t > 0) r = std::min(r, P.facet(i, +1).offset / t);
  }
  if (!std::isfinite(r))
    throw UnboundedBody("radial: direction sees no slab");
  return r;
}

double support_eval(const Polytope& P, const Vec& x) {
  if (x.size() != P.dim())
    throw PreconditionViolated("support: vector dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& v : P.vertices()) best = std::max(best, x.dot(v));
  return best;
}

Polytope direct_sum(const Polytope& P, const Subspace& sigma,
                    const Polytope& Q, const Subspace& tau,
                    const Tolerances& tol) {
  const int n = sigma.ambient_dim();
  if (tau.ambient_dim() != n)
    throw PreconditionViolated("direct sum: ambient dimensions differ");
  if (P.dim() != sigma.dim() || Q.dim() != tau.dim())
    throw PreconditionViolated("direct sum: body/subspace dimension mismatch");
  if (sigma.dim() + tau.dim() != n)
    throw NotComplementary("direct sum: dimensions do not add up");
  std::vector<Vec> both;
  for (int j = 0; j < sigma.dim(); ++j) both.push_back(sigma.basis().col(j));
  for (int j = 0; j < tau.dim(); ++j) both.push_back(tau.basis().col(j));
  if (span_rank(n, both) != n)
    throw NotComplementary("direct sum: subspaces intersect");

  // Facet normals of the sum: the P-side normals are the unique directions
  // orthogonal to tau whose shadow on sigma matches P's normals, and
  // symmetrically for Q.
  const Mat Bto = orthonormal_complement(tau.basis());    // basis of tau-perp
  const Mat Bso = orthonormal_complement(sigma.basis());  // basis of sigma-perp
  Eigen::FullPivLU<Mat> luP(sigma.basis().transpose() * Bto);
  Eigen::FullPivLU<Mat> luQ(tau.basis().transpose() * Bso);
  if (!luP.isInvertible() || !luQ.isInvertible())
    throw NotComplementary("direct sum: degenerate pairing");

  std::vector<Vec> reps;
  std::vector<double> offsets;
  auto side = [&](const Polytope& body, const Subspace& carrier,
                  const Mat& Bperp, Eigen::FullPivLU<Mat>& lu,
                  const Polytope& other, const Subspace& other_carrier) {
    for (int i = 0; i < body.directions().count(); ++i) {
      Vec u = Bperp * lu.solve(body.directions().rep(i));
      const double nu = u.norm();
      if (nu == 0.0) throw NotComplementary("direct sum: direction collapsed");
      u /= nu;
      double h = -std::numeric_limits<double>::infinity();
      for (const Vec& v : body.vertices())
        h = std::max(h, u.dot(carrier.basis() * v));
      double g = -std::numeric_limits<double>::infinity();
      for (const Vec& w : other.vertices())
        g = std::max(g, u.dot(other_carrier.basis() * w));
      reps.push_back(std::move(u));
      offsets.push_back(h + g);
    }
  };
  side(P, sigma, Bto, luP, Q, tau);
  side(Q, tau, Bso, luQ, P, sigma);

  DirectionSet dirs(n, std::move(reps), tol);
  Vec h(dirs.count());
  for (int i = 0; i < dirs.count(); ++i) h[i] = offsets[i];
  return build_wulff_body(dirs, SupportVector(dirs, std::move(h)), tol);
}

}  // namespace logmink
