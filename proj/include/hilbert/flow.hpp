#pragma once

// Unit-speed geodesic flow along projective lines and distance-to-ray
// minimization. No ODE integration: flowing time t along the chord with
// affine parameter s in (s_a, s_b) solves a cross-ratio equation whose
// solution is a Moebius function of e^{2t}.

#include "hilbert/domain.hpp"

namespace hilbert {

struct UnitTangent {
  ProjPoint foot;
  VecC direction;  // chart vector, unit Euclidean length
};

inline UnitTangent make_tangent(const ConvexDomain& om, const ProjPoint& foot, const VecC& dir) {
  require(om.strict_interior(foot), Errc::NotInterior, "tangent foot must be interior");
  const Real len = dir.norm();
  require(len > eps_geom, Errc::BadDomain, "tangent direction is zero");
  return {foot, VecC(dir / len)};
}

inline std::pair<BoundaryPoint, BoundaryPoint> endpoints(const ConvexDomain& om,
                                                         const UnitTangent& v) {
  const VecC z = om.to_chart(v.foot);
  auto h = detail::hit_params(om, z, v.direction);
  BoundaryPoint minus{om.from_chart(VecC(z + h.t_a * v.direction)),
                      h.face_a >= 0 ? std::optional<int>(h.face_a) : std::nullopt};
  BoundaryPoint plus{om.from_chart(VecC(z + h.t_b * v.direction)),
                     h.face_b >= 0 ? std::optional<int>(h.face_b) : std::nullopt};
  return {std::move(minus), std::move(plus)};
}

namespace detail {

// affine parameter of the point at signed Hilbert time t from s=0 along a
// chord with hit parameters s_a < 0 < s_b; the e^{-2t} form keeps the
// forward branch stable for large t (s -> s_b with gap s_b(s_b-s_a)/(s_b-E s_a))
inline Real chord_time_to_param(Real s_a, Real s_b, Real t) {
  if (t >= 0) {
    const Real Ei = std::exp(-2 * t);
    return s_a * s_b * (Ei - 1) / (s_b * Ei - s_a);
  }
  const Real E = std::exp(2 * t);
  return s_a * s_b * (1 - E) / (s_b - E * s_a);
}

}  // namespace detail

inline UnitTangent flow(const ConvexDomain& om, const UnitTangent& v, Real t) {
  if (t == 0) return v;
  const VecC z = om.to_chart(v.foot);
  auto h = detail::hit_params(om, z, v.direction);
  const Real s = detail::chord_time_to_param(h.t_a, h.t_b, t);
  return {om.from_chart(VecC(z + s * v.direction)), v.direction};
}

// interior point at Hilbert time t >= 0 along the ray from x toward xi
inline ProjPoint ray_point(const ConvexDomain& om, const ProjPoint& x, const BoundaryPoint& xi,
                           Real t) {
  const VecC zx = om.to_chart(x);
  const VecC d = om.to_chart(xi.point) - zx;
  auto h = detail::hit_params(om, zx, d);
  const Real s = detail::chord_time_to_param(h.t_a, h.t_b, t);
  return om.from_chart(VecC(zx + s * d));
}

inline Real min_dist_to_ray(const ConvexDomain& om, const ProjPoint& x, const BoundaryPoint& xi,
                            const ProjPoint& y) {
  require(om.strict_interior(x) && om.strict_interior(y), Errc::NotInterior,
          "min_dist_to_ray needs interior points");
  const VecC zx = om.to_chart(x);
  const VecC zy = om.to_chart(y);
  const VecC d = om.to_chart(xi.point) - zx;
  auto h = detail::hit_params(om, zx, d);
  auto at = [&](Real t) {
    const Real s = detail::chord_time_to_param(h.t_a, h.t_b, t);
    return detail::dist_chart(om, VecC(zx + s * d), zy);
  };
  // t -> d(ray(t), y) is quasiconvex (Hilbert balls are convex): bracket the
  // minimizer by doubling, then ternary search
  const Real g0 = at(0);
  Real hi = 1, prev = g0;
  for (int i = 0; i < 64; ++i) {
    const Real g = at(hi);
    if (g > prev + 1e-12L && g > g0) break;
    prev = g;
    hi *= 2;
    if (hi > 4 * g0 + 64) break;  // distance grows like t - const eventually
  }
  Real lo = 0;
  Real best = std::min(g0, prev);
  for (int i = 0; i < 200; ++i) {
    const Real m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    const Real g1 = at(m1), g2 = at(m2);
    best = std::min({best, g1, g2});
    if (g1 <= g2) hi = m2;
    else lo = m1;
    if (hi - lo < 1e-12L) break;
  }
  return best;
}

}  // namespace hilbert
