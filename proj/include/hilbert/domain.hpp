#pragma once

// Properly convex domains: ellipsoids, polytopes, and the orthant simplex,
// with boundary-hit queries, supporting hyperplanes, the Hilbert metric, and
// proper/extremal classification of boundary points.

#include "hilbert/projective.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace hilbert {

struct BoundaryPoint {
  ProjPoint point;
  std::optional<int> face_id;  // polytope facet index when known
};

struct SupportingHyperplane {
  RowH covector;  // nonnegative on the closure, zero at the contact point
};

struct BoundaryClassification {
  bool proper = false;
  bool extremal = false;
};

enum class DomainKind { Ellipsoid, Polytope, Simplex };

struct Ellipsoid {
  VecC center;
  MatC shape;  // symmetric positive definite; domain is (z-c)^T A (z-c) < 1
};

struct Polytope {
  std::vector<RowH> facets;   // homogeneous covectors, positive on the interior
  std::vector<VecC> vertices; // chart coordinates
};

class ConvexDomain {
 public:
  DomainKind kind;
  int n = 0;  // chart dimension
  AffineChart chart;
  Ellipsoid ell;
  Polytope poly;

  static ConvexDomain ellipsoid(int dim) {
    return ellipsoid(VecC::Zero(dim), MatC::Identity(dim, dim), AffineChart::standard(dim));
  }

  static ConvexDomain ellipsoid(VecC center, MatC shape, AffineChart chart) {
    ConvexDomain d;
    d.kind = DomainKind::Ellipsoid;
    d.n = static_cast<int>(center.size());
    d.chart = std::move(chart);
    require(d.chart.dim() == d.n, Errc::BadDomain, "chart dimension mismatch");
    MatC sym = (shape + shape.transpose()) / 2;
    Eigen::LLT<MatC> llt(sym);
    require(llt.info() == Eigen::Success, Errc::BadDomain, "ellipsoid shape not positive definite");
    d.ell.center = std::move(center);
    d.ell.shape = std::move(sym);
    return d;
  }

  // half_spaces are affine forms (a, c) meaning a.x + c >= 0 in chart coords
  static ConvexDomain polytope(const std::vector<std::pair<RowC, Real>>& half_spaces,
                               std::vector<VecC> vertices, AffineChart chart) {
    ConvexDomain d;
    d.kind = DomainKind::Polytope;
    require(!vertices.empty() && !half_spaces.empty(), Errc::BadDomain, "empty polytope data");
    d.n = static_cast<int>(vertices.front().size());
    d.chart = std::move(chart);
    require(d.chart.dim() == d.n, Errc::BadDomain, "chart dimension mismatch");
    for (const auto& [a, c] : half_spaces) d.poly.facets.push_back(d.chart.homogeneous_covector(a, c));
    d.poly.vertices = std::move(vertices);
    d.validate_polytope();
    return d;
  }

  static ConvexDomain polytope_homogeneous(std::vector<RowH> facets, std::vector<VecC> vertices,
                                           AffineChart chart) {
    ConvexDomain d;
    d.kind = DomainKind::Polytope;
    require(!vertices.empty() && !facets.empty(), Errc::BadDomain, "empty polytope data");
    d.n = static_cast<int>(vertices.front().size());
    d.chart = std::move(chart);
    d.poly.facets = std::move(facets);
    d.poly.vertices = std::move(vertices);
    d.validate_polytope();
    return d;
  }

  // The n-simplex as the projectivized positive orthant of R^{n+1}; the chart
  // functional (1,...,1) bounds it as {u_i > 0, sum u_i < 1} in chart coords.
  // Diagonal matrices act on it exactly, which deep orbit enumeration relies on.
  static ConvexDomain simplex(int dim) {
    ConvexDomain d;
    d.kind = DomainKind::Simplex;
    d.n = dim;
    d.chart = AffineChart::from_functional(RowH::Ones(dim + 1));
    for (int i = 0; i <= dim; ++i) {
      RowH g = RowH::Zero(dim + 1);
      g[i] = 1;
      d.poly.facets.push_back(g);
    }
    for (int i = 0; i <= dim; ++i) {
      VecC v = VecC::Zero(dim);
      if (i < dim) v[i] = 1;
      d.poly.vertices.push_back(v);
    }
    d.validate_polytope();
    return d;
  }

  bool is_polytopal() const { return kind != DomainKind::Ellipsoid; }

  // quadric value in chart coords; negative inside
  Real quadric(const VecC& z) const {
    VecC w = z - ell.center;
    return Real(w.transpose() * ell.shape * w) - 1;
  }

  VecC to_chart(const ProjPoint& p) const { return chart.to_chart(p); }
  ProjPoint from_chart(const VecC& z) const { return chart.from_chart(z); }

  // interior in the strict sense, used as precondition for metric operations
  bool strict_interior(const ProjPoint& p) const {
    if (std::abs(chart.eval(p.v)) <= eps_geom) return false;
    if (is_polytopal()) {
      VecH q = chart.normalize(p.v);
      for (const auto& g : poly.facets)
        if (g * q <= 0) return false;
      return true;
    }
    return quadric(to_chart(p)) < 0;
  }

  ProjPoint default_base_point() const {
    if (kind == DomainKind::Ellipsoid) return from_chart(ell.center);
    VecC m = VecC::Zero(n);
    for (const auto& v : poly.vertices) m += v;
    return from_chart(VecC(m / Real(poly.vertices.size())));
  }

 private:
  void validate_polytope() {
    const int dim = n;
    for (const auto& g : poly.facets)
      require(g.size() == dim + 1, Errc::BadDomain, "facet covector length mismatch");
    VecC mean = VecC::Zero(dim);
    for (const auto& v : poly.vertices) {
      require(static_cast<int>(v.size()) == dim, Errc::BadDomain, "vertex length mismatch");
      mean += v;
    }
    mean /= Real(poly.vertices.size());
    VecH centre = chart.lift(mean);
    std::vector<int> per_facet(poly.facets.size(), 0);
    for (const auto& v : poly.vertices) {
      VecH hv = chart.lift(v);
      int tight = 0;
      for (std::size_t i = 0; i < poly.facets.size(); ++i) {
        Real val = poly.facets[i] * hv;
        require(val >= -tol_boundary, Errc::BadDomain, "vertex violates a half-space");
        if (std::abs(val) <= tol_boundary) {
          ++tight;
          ++per_facet[i];
        }
      }
      require(tight >= dim, Errc::BadDomain, "vertex not on enough facets");
    }
    for (std::size_t i = 0; i < poly.facets.size(); ++i) {
      require(per_facet[i] >= dim, Errc::BadDomain, "facet carries too few vertices");
      require(poly.facets[i] * centre > tol_boundary * centre.norm(), Errc::BadDomain,
              "vertex mean is not interior");
    }
  }
};

namespace detail {

// Boundary hits of the chart line z + t d. For polytopes the homogeneous path
// lift(z) + t (d, -f_head.d / f_n) keeps every facet value affine in t.
struct HitParams {
  Real t_a = 0, t_b = 0;          // backward / forward parameters, t_a < 0 < t_b
  int face_a = -1, face_b = -1;   // polytope facet indices
  Real alpha = 0, gamma = 0;      // ellipsoid quadratic data, q(t) = alpha t^2 + beta t + gamma
};

inline VecH direction_lift(const AffineChart& chart, const VecC& d) {
  int n = chart.dim();
  VecH D(n + 1);
  D.head(n) = d;
  D[n] = -Real(chart.f.head(n) * d) / chart.f[n];
  return D;
}

inline HitParams hit_params(const ConvexDomain& om, const VecC& z, const VecC& d) {
  HitParams h;
  if (om.is_polytopal()) {
    VecH p0 = om.chart.lift(z);
    VecH D = direction_lift(om.chart, d);
    bool have_a = false, have_b = false;
    for (std::size_t i = 0; i < om.poly.facets.size(); ++i) {
      const Real v0 = om.poly.facets[i] * p0;
      const Real s = om.poly.facets[i] * D;
      require(v0 > 0, Errc::NotInterior, "line base point outside the polytope");
      if (s == 0) continue;
      const Real t = -v0 / s;
      if (s < 0) {
        if (!have_b || t < h.t_b) h.t_b = t, h.face_b = static_cast<int>(i), have_b = true;
      } else {
        if (!have_a || t > h.t_a) h.t_a = t, h.face_a = static_cast<int>(i), have_a = true;
      }
    }
    require(have_a && have_b, Errc::BadDomain, "line does not exit the polytope");
    return h;
  }
  const VecC w = z - om.ell.center;
  const Real alpha = Real(d.transpose() * om.ell.shape * d);
  const Real beta = 2 * Real(d.transpose() * om.ell.shape * w);
  const Real gamma = om.quadric(z);
  require(gamma < 0, Errc::NotInterior, "line base point outside the ellipsoid");
  const Real disc = beta * beta - 4 * alpha * gamma;
  const Real root = std::sqrt(disc);
  const Real r1 = (beta >= 0) ? (-beta - root) / (2 * alpha) : (-beta + root) / (2 * alpha);
  const Real r2 = gamma / (alpha * r1);
  h.t_a = std::min(r1, r2);
  h.t_b = std::max(r1, r2);
  h.alpha = alpha;
  h.gamma = gamma;
  return h;
}

// Hilbert distance along a known segment. Cancellation-free: the ellipsoid
// branch rewrites the extreme cross-ratio factors through quadric values at
// the endpoints, the polytope branch works on raw facet functionals.
inline Real dist_chart(const ConvexDomain& om, const VecC& zx, const VecC& zy) {
  const VecC d = zy - zx;
  const Real len = d.norm();
  if (len == 0) return 0;
  if (om.is_polytopal()) {
    VecH px = om.chart.lift(zx), py = om.chart.lift(zy);
    Real lo = 0, hi = 0;
    bool first = true;
    for (const auto& g : om.poly.facets) {
      const Real vx = g * px, vy = g * py;
      require(vx > 0 && vy > 0, Errc::NotInterior, "point outside the polytope");
      const Real lam = std::log(vy) - std::log(vx);
      if (first) lo = hi = lam, first = false;
      else lo = std::min(lo, lam), hi = std::max(hi, lam);
    }
    return (hi - lo) / 2;
  }
  auto h = hit_params(om, zx, d);  // segment parameter t in [0,1] from x to y
  const Real q1 = om.quadric(zy);
  require(q1 < 0, Errc::NotInterior, "point outside the ellipsoid");
  // CR = ((1-t_a) t_b) / ((-t_a)(t_b-1)) with -t_a = -gamma/(alpha t_b) and
  // t_b - 1 = -q1/(alpha (1-t_a)); both are quadric values, no root subtraction
  const Real log_cr = 2 * std::log(1 - h.t_a) + 2 * std::log(h.t_b) + 2 * std::log(h.alpha) -
                      std::log(-h.gamma) - std::log(-q1);
  return std::abs(log_cr) / 2;
}

// distance from a chart point to the projective point with raw homogeneous
// coordinates Y (used by orbit code where Y = M * basepoint, unnormalized)
inline Real dist_to_homogeneous(const ConvexDomain& om, const VecC& zx, const VecH& Y) {
  if (om.is_polytopal()) {
    VecH px = om.chart.lift(zx);
    Real lo = 0, hi = 0;
    bool first = true;
    for (const auto& g : om.poly.facets) {
      const Real vx = g * px, vy = g * Y;
      require(vx > 0, Errc::NotInterior, "base point outside the polytope");
      require(vy > 0, Errc::NotInterior, "orbit point outside the polytope");
      const Real lam = std::log(vy) - std::log(vx);
      if (first) lo = hi = lam, first = false;
      else lo = std::min(lo, lam), hi = std::max(hi, lam);
    }
    return (hi - lo) / 2;
  }
  return dist_chart(om, zx, VecC(om.chart.normalize(Y).head(om.n)));
}

}  // namespace detail

inline bool contains(const ConvexDomain& om, const ProjPoint& x) {
  require(std::abs(om.chart.eval(x.v)) > eps_geom * x.v.norm(), Errc::ChartUndefined,
          "point at infinity of the domain chart");
  if (om.is_polytopal()) {
    VecH q = om.chart.normalize(x.v);
    for (const auto& g : om.poly.facets)
      if (g * q <= eps_geom) return false;
    return true;
  }
  return om.quadric(om.to_chart(x)) < -eps_geom;
}

// boundary hits of the line through x and y, ordered a, x, y, b
inline std::pair<BoundaryPoint, BoundaryPoint> line_hits(const ConvexDomain& om,
                                                         const ProjPoint& x, const ProjPoint& y) {
  require(om.strict_interior(x) && om.strict_interior(y), Errc::NotInterior,
          "line_hits needs interior points");
  require(!x.approx_equal(y), Errc::CoincidentPoints, "line through coincident points");
  const VecC zx = om.to_chart(x), zy = om.to_chart(y);
  const VecC d = zy - zx;
  auto h = detail::hit_params(om, zx, d);
  BoundaryPoint a{om.from_chart(VecC(zx + h.t_a * d)),
                  h.face_a >= 0 ? std::optional<int>(h.face_a) : std::nullopt};
  BoundaryPoint b{om.from_chart(VecC(zx + h.t_b * d)),
                  h.face_b >= 0 ? std::optional<int>(h.face_b) : std::nullopt};
  return {std::move(a), std::move(b)};
}

inline Real hilbert_distance(const ConvexDomain& om, const ProjPoint& x, const ProjPoint& y) {
  if (x.approx_equal(y, eps_geom)) return 0;
  require(om.strict_interior(x) && om.strict_interior(y), Errc::NotInterior,
          "hilbert_distance needs interior points");
  return detail::dist_chart(om, om.to_chart(x), om.to_chart(y));
}

inline bool on_boundary(const ConvexDomain& om, const ProjPoint& p) {
  if (std::abs(om.chart.eval(p.v)) <= eps_geom * p.v.norm()) return false;
  if (om.is_polytopal()) {
    VecH q = om.chart.normalize(p.v);
    Real mn = 0;
    bool first = true;
    for (const auto& g : om.poly.facets) {
      Real v = g * q;
      if (first) mn = v, first = false;
      else mn = std::min(mn, v);
    }
    return std::abs(mn) <= tol_boundary;
  }
  return std::abs(om.quadric(om.to_chart(p))) <= tol_boundary;
}

inline std::vector<SupportingHyperplane> supports_at(const ConvexDomain& om,
                                                     const BoundaryPoint& p) {
  require(on_boundary(om, p.point), Errc::NotOnBoundary, "supports_at needs a boundary point");
  std::vector<SupportingHyperplane> out;
  if (om.is_polytopal()) {
    VecH q = om.chart.normalize(p.point.v);
    for (const auto& g : om.poly.facets)
      if (std::abs(g * q) <= tol_boundary) out.push_back({g});
    return out;
  }
  const VecC z = om.to_chart(p.point);
  const VecC grad = 2 * (om.ell.shape * (z - om.ell.center));  // outward
  RowC a = -grad.transpose();
  out.push_back({om.chart.homogeneous_covector(a, grad.dot(z))});
  return out;
}

inline BoundaryClassification classify_boundary(const ConvexDomain& om, const BoundaryPoint& p) {
  require(on_boundary(om, p.point), Errc::NotOnBoundary, "classify_boundary needs a boundary point");
  if (!om.is_polytopal()) return {true, true};
  BoundaryClassification c;
  c.proper = supports_at(om, p).size() == 1;
  const VecC z = om.to_chart(p.point);
  c.extremal = false;
  for (const auto& v : om.poly.vertices)
    if ((v - z).norm() <= 1e-8L) c.extremal = true;
  return c;
}

// image domain T(Omega), re-extracted in the standard chart (ellipsoids) or
// the source chart (polytopes); lets invariance tests compare d_{T Omega}
inline ConvexDomain transformed(const ConvexDomain& om, const ProjTransform& T) {
  ProjTransform Ti = T.inverse();
  if (om.is_polytopal()) {
    std::vector<RowH> facets;
    for (const auto& g : om.poly.facets) facets.push_back(g * Ti.m);
    std::vector<VecC> verts;
    for (const auto& v : om.poly.vertices)
      verts.push_back(om.chart.to_chart(apply(T, om.from_chart(v))));
    ConvexDomain d = ConvexDomain::polytope_homogeneous(std::move(facets), std::move(verts), om.chart);
    d.kind = om.kind;
    return d;
  }
  require(om.chart.f == AffineChart::standard(om.n).f, Errc::BadTransform,
          "ellipsoid transforms are supported in the standard chart");
  const int n = om.n;
  MatH Q(n + 1, n + 1);
  Q.topLeftCorner(n, n) = om.ell.shape;
  Q.topRightCorner(n, 1) = -om.ell.shape * om.ell.center;
  Q.bottomLeftCorner(1, n) = (-om.ell.shape * om.ell.center).transpose();
  Q(n, n) = Real(om.ell.center.transpose() * om.ell.shape * om.ell.center) - 1;
  MatH S = Ti.m.transpose() * Q * Ti.m;
  S = ((S + S.transpose()) / 2).eval();
  MatC A = S.topLeftCorner(n, n);
  VecC b = S.topRightCorner(n, 1);
  Eigen::LLT<MatC> llt(A);
  require(llt.info() == Eigen::Success, Errc::BadTransform,
          "image quadric is not bounded in the standard chart");
  VecC center = llt.solve(-b);
  const Real k = -b.dot(center) - S(n, n);
  require(k > 0, Errc::BadTransform, "image quadric has empty interior");
  return ConvexDomain::ellipsoid(center, MatC(A / k), AffineChart::standard(n));
}

}  // namespace hilbert
