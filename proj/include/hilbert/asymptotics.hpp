#pragma once

// Boundary-at-infinity computations: asymptoticity of lines, the Busemann
// cocycle via an incidence construction plus an independent limit oracle,
// horosphere points, shadow membership, and stable/unstable leaf relations.

#include "hilbert/flow.hpp"

namespace hilbert {

struct BoundaryDirection {
  BoundaryPoint target;
  ProjPoint basepoint;
};

inline BoundaryDirection boundary_direction(const ConvexDomain& om, const BoundaryPoint& target,
                                            const ProjPoint& basepoint) {
  require(om.strict_interior(basepoint), Errc::NotInterior, "direction basepoint must be interior");
  require(on_boundary(om, target.point), Errc::NotOnBoundary, "direction target must be on the boundary");
  return {target, basepoint};
}

enum class LeafRelation { StrongStable, StrongUnstable, WeakStable, WeakUnstable, None };

struct LeafResult {
  LeafRelation relation = LeafRelation::None;
  bool coincident = false;  // both forward and backward endpoints agree
};

inline bool lines_asymptotic(const ConvexDomain& om, const BoundaryPoint& xi,
                             const BoundaryPoint& eta) {
  require(on_boundary(om, xi.point) && on_boundary(om, eta.point), Errc::NotOnBoundary,
          "lines_asymptotic needs boundary points");
  if (xi.point.approx_equal(eta.point)) return true;
  if (!om.is_polytopal()) return false;  // strictly convex: H meets the boundary in one point
  auto sx = supports_at(om, xi);
  auto se = supports_at(om, eta);
  if (sx.size() != 1 || se.size() != 1) return false;  // relative interior of a single facet
  return (sx[0].covector - se[0].covector).norm() <= 1e-8L * sx[0].covector.norm();
}

namespace detail {

inline void require_proper_extremal(const ConvexDomain& om, const BoundaryPoint& xi) {
  auto c = classify_boundary(om, xi);
  require(c.proper && c.extremal, Errc::NotProperExtremal,
          "Busemann functions need a proper extremal boundary point");
}

// rank-2 test for three homogeneous vectors
inline bool triple_collinear(const VecH& a, const VecH& b, const VecH& c, Real tol) {
  MatH m(a.size(), 3);
  m.col(0) = a.normalized();
  m.col(1) = b.normalized();
  m.col(2) = c.normalized();
  Eigen::JacobiSVD<MatH> svd(m);
  const auto& s = svd.singularValues();
  return s[2] <= tol * s[0];
}

inline Eigen::Matrix<Real, 3, 1> cross3(const Eigen::Matrix<Real, 3, 1>& u,
                                        const Eigen::Matrix<Real, 3, 1>& v) {
  return u.cross(v);
}

}  // namespace detail

// Busemann cocycle beta_xi(x, y) by incidence: with H the support at xi, the
// backward hits xi_minus, eta_minus of the rays from x and y, and
// q = line(xi_minus, eta_minus) meet H, the point ybar = line(y,q) meet
// line(x, xi) satisfies beta = (1/2) log [xi_minus : x : ybar : xi], signed.
// All meets are taken in the projective plane spanned by x, y, xi, so no
// affine-chart choice is involved.
inline Real busemann(const ConvexDomain& om, const BoundaryDirection& xi, const ProjPoint& x,
                     const ProjPoint& y) {
  detail::require_proper_extremal(om, xi.target);
  require(om.strict_interior(x) && om.strict_interior(y), Errc::NotInterior,
          "busemann needs interior points");
  if (x.approx_equal(y, eps_geom)) return 0;
  const VecH xp = xi.target.point.v;

  if (detail::triple_collinear(x.v, y.v, xp, 1e-9L)) {
    // y on the line through x and xi: beta is the signed distance, positive
    // when y sits between x and xi
    const VecC zx = om.to_chart(x);
    const VecC d = om.to_chart(xi.target.point) - zx;
    const Real sy = (om.to_chart(y) - zx).dot(d) / d.squaredNorm();
    const Real dist = hilbert_distance(om, x, y);
    return sy > 0 ? dist : -dist;
  }

  // backward boundary hits of the two rays into xi
  const VecC zx = om.to_chart(x), zy = om.to_chart(y);
  const VecC zxi = om.to_chart(xi.target.point);
  auto hx = detail::hit_params(om, zx, VecC(zxi - zx));
  auto hy = detail::hit_params(om, zy, VecC(zxi - zy));
  const VecH xi_minus = om.from_chart(VecC(zx + hx.t_a * (zxi - zx))).v;
  const VecH eta_minus = om.from_chart(VecC(zy + hy.t_a * (zxi - zy))).v;
  const RowH support = supports_at(om, {xi.target.point, xi.target.face_id})[0].covector;

  // orthonormal basis of span{x, y, xi}; identity coordinates when n = 2
  using V3 = Eigen::Matrix<Real, 3, 1>;
  MatH basis;
  if (x.dim() == 2) basis = MatH::Identity(3, 3);
  else {
    MatH span(x.v.size(), 3);
    span.col(0) = x.v;
    span.col(1) = y.v;
    span.col(2) = xp;
    Eigen::JacobiSVD<MatH> svd(span, Eigen::ComputeThinU);
    basis = svd.matrixU().leftCols(3);
  }
  const V3 X = basis.transpose() * x.v;
  const V3 Y = basis.transpose() * y.v;
  const V3 Xi = basis.transpose() * xp;
  const V3 Xm = basis.transpose() * xi_minus;
  const V3 Em = basis.transpose() * eta_minus;
  const V3 h = (support * basis).transpose();

  const V3 join_minus = detail::cross3(Xm, Em);
  require(join_minus.norm() > eps_geom * Xm.norm() * Em.norm(), Errc::IncidenceDegenerate,
          "backward hits coincide");
  const V3 q = detail::cross3(join_minus, h);
  require(q.norm() > eps_geom * join_minus.norm() * h.norm(), Errc::IncidenceDegenerate,
          "support line contains both backward hits");
  const V3 ybar = detail::cross3(detail::cross3(Y, q), detail::cross3(X, Xi));
  require(ybar.norm() > eps_geom, Errc::IncidenceDegenerate, "transferred point degenerates");

  const Real cr = cross_ratio(ProjPoint::from(Xm), ProjPoint::from(X), ProjPoint::from(ybar),
                              ProjPoint::from(Xi));
  require(cr > 0, Errc::IncidenceDegenerate, "transferred point left the chord");
  return std::log(cr) / 2;
}

// Brute-force oracle d(x, z_T) - d(y, z_T) with z_T at Hilbert time T along
// the ray [x, xi). Once the chord gap sigma = s_b - s(T) is too small for
// direct evaluation, boundary functional values at z_T are carried in log
// form (log sigma = -2T + ... via logaddexp), which keeps the oracle exact
// for T far beyond the representable-coordinate regime.
inline Real busemann_limit_oracle(const ConvexDomain& om, const BoundaryDirection& xi,
                                  const ProjPoint& x, const ProjPoint& y, Real T) {
  require(om.strict_interior(x) && om.strict_interior(y), Errc::NotInterior,
          "oracle needs interior points");
  if (x.approx_equal(y, eps_geom)) return 0;
  const VecC zx = om.to_chart(x), zy = om.to_chart(y);
  const VecC zb = om.to_chart(xi.target.point);
  const VecC d = zb - zx;
  auto h = detail::hit_params(om, zx, d);
  const Real Ei = std::exp(-2 * T);
  const Real span = h.t_b - h.t_a;
  const Real sigma = h.t_b * span * Ei / (h.t_b * Ei - h.t_a);

  if (sigma > 1e-8L * span) {
    const VecC zT = zx + (h.t_b - sigma) * d;
    return detail::dist_chart(om, zx, zT) - detail::dist_chart(om, zy, zT);
  }

  const Real log_sigma =
      std::log(h.t_b) + std::log(span) - 2 * T - logaddexp(std::log(h.t_b) - 2 * T, std::log(-h.t_a));
  const Real sigma_mat = std::exp(log_sigma);  // may underflow to 0, used only in corrections

  if (om.is_polytopal()) {
    // z_T = z(t_b) - sigma d in homogeneous terms; facet values incident at
    // the endpoint are rebuilt from log sigma, the rest evaluated directly
    const VecH pb = om.chart.lift(VecC(zx + h.t_b * d));
    const VecH py = om.chart.lift(zy);
    const VecH D = detail::direction_lift(om.chart, d);
    Real lo = 0, hi = 0;
    bool first = true;
    for (const auto& g : om.poly.facets) {
      const Real vb = g * pb;
      const Real slope = g * D;
      Real logv;
      if (std::abs(vb) <= 1e-12L * g.norm() * pb.norm()) {
        require(slope < 0, Errc::ComputeError, "incident facet fails to cut the ray");
        logv = log_sigma + std::log(-slope);
      } else {
        logv = std::log(vb - sigma_mat * slope);
      }
      const Real vy = g * py;
      require(vy > 0, Errc::NotInterior, "point outside the polytope");
      const Real lam = logv - std::log(vy);
      if (first) lo = hi = lam, first = false;
      else lo = std::min(lo, lam), hi = std::max(hi, lam);
    }
    return T - (hi - lo) / 2;
  }

  // ellipsoid: Q(z_T) = -sigma (grad Q(b).d - sigma d^T A d) in log form, then
  // the chord y -> z_T (direction zb - zy up to O(sigma)) gives d(y, z_T)
  const VecC b_pt = zx + h.t_b * d;
  const Real grad_d = 2 * Real((b_pt - om.ell.center).transpose() * om.ell.shape * d);
  const Real dAd = Real(d.transpose() * om.ell.shape * d);
  const Real corr = grad_d - sigma_mat * dAd;
  require(corr > 0, Errc::ComputeError, "ray fails to exit through the target point");
  const Real log_neg_q1 = log_sigma + std::log(corr);

  const VecC dir = zb - zy;
  auto hy = detail::hit_params(om, zy, dir);
  const Real u_a = hy.t_a;
  const Real log_alpha = std::log(hy.alpha);
  const Real log_sy = log_neg_q1 - log_alpha - std::log(1 - u_a);
  const Real d_y = (2 * std::log(1 - u_a) + 2 * std::log1p(std::exp(log_sy)) + 2 * log_alpha -
                    std::log(-hy.gamma) - log_neg_q1) /
                   2;
  return T - d_y;
}

// zero of t -> beta_xi(x, ray_w(t)) along the ray from w into xi; the cocycle
// pins the zero at t = -beta_xi(x, w), bisection then meets the 1e-8 residual
inline ProjPoint horosphere_point(const ConvexDomain& om, const BoundaryDirection& xi,
                                  const ProjPoint& x, const ProjPoint& w) {
  detail::require_proper_extremal(om, xi.target);
  require(om.strict_interior(x) && om.strict_interior(w), Errc::NotInterior,
          "horosphere_point needs interior points");
  const Real beta0 = busemann(om, xi, x, w);
  auto point_at = [&](Real t) { return ray_point(om, w, xi.target, t); };
  auto val_at = [&](Real t) { return busemann(om, xi, x, point_at(t)); };
  Real lo = -beta0 - 0.5L, hi = -beta0 + 0.5L;
  Real flo = val_at(lo), fhi = val_at(hi);
  for (int i = 0; i < 8 && flo * fhi > 0; ++i) {
    lo -= 0.5L * (1 << i);
    hi += 0.5L * (1 << i);
    flo = val_at(lo);
    fhi = val_at(hi);
  }
  require(flo * fhi <= 0, Errc::NoBracket, "no sign change along the ray");
  Real mid = (lo + hi) / 2;
  for (int i = 0; i < 100; ++i) {
    mid = (lo + hi) / 2;
    const Real fm = val_at(mid);
    if (std::abs(fm) < 1e-8L / 4) break;
    if ((fm > 0) == (fhi > 0)) hi = mid, fhi = fm;
    else lo = mid, flo = fm;
  }
  return point_at(mid);
}

inline bool shadow_contains(const ConvexDomain& om, const ProjPoint& x, const ProjPoint& y, Real r,
                            const BoundaryPoint& xi) {
  require(r > 0, Errc::BadDomain, "shadow radius must be positive");
  return min_dist_to_ray(om, x, xi, y) < r;
}

struct ShadowBoundCheck {
  Real beta = 0;
  Real d = 0;
  bool ok = false;
};

inline ShadowBoundCheck shadow_busemann_bound_check(const ConvexDomain& om, const ProjPoint& x,
                                                    const ProjPoint& y, Real r,
                                                    const BoundaryPoint& xi) {
  require(shadow_contains(om, x, y, r, xi), Errc::ComputeError,
          "boundary point is not in the shadow");
  ShadowBoundCheck out;
  out.beta = busemann(om, {xi, x}, x, y);
  out.d = hilbert_distance(om, x, y);
  out.ok = (out.d - 2 * r - 1e-8L <= out.beta) && (out.beta <= out.d + 1e-8L);
  return out;
}

inline LeafResult leaf_relation(const ConvexDomain& om, const UnitTangent& v, const UnitTangent& w) {
  auto [vm, vp] = endpoints(om, v);
  auto [wm, wp] = endpoints(om, w);
  detail::require_proper_extremal(om, vp);
  detail::require_proper_extremal(om, vm);
  detail::require_proper_extremal(om, wp);
  detail::require_proper_extremal(om, wm);
  const bool plus = vp.point.approx_equal(wp.point);
  const bool minus = vm.point.approx_equal(wm.point);
  LeafResult out;
  out.coincident = plus && minus;
  const Real beta_tol = 1e-7L;
  if (plus && std::abs(busemann(om, {vp, v.foot}, v.foot, w.foot)) <= beta_tol)
    out.relation = LeafRelation::StrongStable;
  else if (minus && std::abs(busemann(om, {vm, v.foot}, v.foot, w.foot)) <= beta_tol)
    out.relation = LeafRelation::StrongUnstable;
  else if (plus) out.relation = LeafRelation::WeakStable;
  else if (minus) out.relation = LeafRelation::WeakUnstable;
  return out;
}

}  // namespace hilbert
