#include <catch2/catch_amalgamated.hpp>

#include "hilbert/asymptotics.hpp"

using namespace hilbert;

namespace {

ProjPoint chart_pt(const ConvexDomain& om, Real x, Real y) {
  VecC z(2);
  z << x, y;
  return om.from_chart(z);
}

BoundaryPoint circle_pt(const ConvexDomain& disk, Real theta) {
  return {chart_pt(disk, std::cos(theta), std::sin(theta)), std::nullopt};
}

VecC rand_disk_pt(Rng& rng, Real rmax = 0.85L) {
  for (;;) {
    VecC z(2);
    z << rng.uniform(-1, 1), rng.uniform(-1, 1);
    if (z.norm() < rmax) return z;
  }
}

ProjTransform disk_boost(Real s, Real angle) {
  const Real C = std::cosh(s), S = std::sinh(s);
  MatH boost(3, 3), rot(3, 3);
  boost << C, 0, S, 0, 1, 0, S, 0, C;
  rot << std::cos(angle), -std::sin(angle), 0, std::sin(angle), std::cos(angle), 0, 0, 0, 1;
  return ProjTransform{MatH(rot * boost * rot.transpose())};
}

}  // namespace

TEST_CASE("asymptotic lines") {
  auto disk = ConvexDomain::ellipsoid(2);
  auto xi = circle_pt(disk, 0.3L);
  CHECK(lines_asymptotic(disk, xi, xi));
  CHECK_FALSE(lines_asymptotic(disk, xi, circle_pt(disk, 0.9L)));

  auto tri = ConvexDomain::simplex(2);
  BoundaryPoint e1{chart_pt(tri, 0.3L, 0), std::nullopt};
  BoundaryPoint e2{chart_pt(tri, 0.6L, 0), std::nullopt};
  BoundaryPoint other{chart_pt(tri, 0, 0.5L), std::nullopt};
  BoundaryPoint vert{chart_pt(tri, 0, 0), std::nullopt};
  CHECK(lines_asymptotic(tri, e1, e2));
  CHECK_FALSE(lines_asymptotic(tri, e1, other));
  CHECK_FALSE(lines_asymptotic(tri, e1, vert));  // vertex is not in an edge interior
}

TEST_CASE("busemann collinear and basic values") {
  auto disk = ConvexDomain::ellipsoid(2);
  ProjPoint o = chart_pt(disk, 0, 0);
  BoundaryDirection xi{circle_pt(disk, 0), o};

  CHECK(busemann(disk, xi, o, o) == 0);

  // y on the ray toward xi: beta equals the distance, with sign
  ProjPoint y = chart_pt(disk, 0.5L, 0);
  const Real d = hilbert_distance(disk, o, y);
  CHECK(std::abs(busemann(disk, xi, o, y) - d) <= 1e-12L);
  CHECK(std::abs(busemann(disk, xi, y, o) + d) <= 1e-12L);
}

TEST_CASE("busemann against the limit oracle") {
  auto disk = ConvexDomain::ellipsoid(2);
  ProjPoint o = chart_pt(disk, 0, 0);
  BoundaryDirection xi{circle_pt(disk, 0), o};
  ProjPoint y = chart_pt(disk, 0, 0.5L);

  const Real via_construction = busemann(disk, xi, o, y);
  const Real via_oracle = busemann_limit_oracle(disk, xi, o, y, 30);
  CHECK(std::abs(via_construction - via_oracle) <= 1e-6L);
  CHECK(via_construction == Catch::Approx(0.5 * std::log(0.75)).margin(1e-9));

  Rng rng(3001);
  for (int trial = 0; trial < 120; ++trial) {
    ProjPoint x = disk.from_chart(rand_disk_pt(rng));
    ProjPoint w = disk.from_chart(rand_disk_pt(rng));
    BoundaryDirection dir{circle_pt(disk, rng.uniform(0, 6.28318L)), x};
    const Real a = busemann(disk, dir, x, w);
    const Real b = busemann_limit_oracle(disk, dir, x, w, 30);
    CHECK(std::abs(a - b) <= 1e-6L);
  }
}

TEST_CASE("limit oracle properties") {
  auto disk = ConvexDomain::ellipsoid(2);
  ProjPoint o = chart_pt(disk, 0, 0);
  BoundaryDirection xi{circle_pt(disk, 0), o};
  CHECK(busemann_limit_oracle(disk, xi, o, o, 7) == 0);

  // y on the ray, T beyond y: exactly the distance
  ProjPoint y = chart_pt(disk, 0.5L, 0);
  const Real d = hilbert_distance(disk, o, y);
  CHECK(std::abs(busemann_limit_oracle(disk, xi, o, y, 5) - d) <= 1e-12L);

  Rng rng(88);
  for (int trial = 0; trial < 60; ++trial) {
    ProjPoint x = disk.from_chart(rand_disk_pt(rng));
    ProjPoint w = disk.from_chart(rand_disk_pt(rng));
    BoundaryDirection dir{circle_pt(disk, rng.uniform(0, 6.28318L)), x};
    const Real t30 = busemann_limit_oracle(disk, dir, x, w, 30);
    const Real t40 = busemann_limit_oracle(disk, dir, x, w, 40);
    CHECK(std::abs(t30 - t40) <= 1e-8L);
  }

  // the simplex oracle stabilizes too (moderate horizon, polytope branch)
  auto tri = ConvexDomain::simplex(2);
  ProjPoint b = chart_pt(tri, 0.3L, 0.3L);
  ProjPoint w2 = chart_pt(tri, 0.2L, 0.5L);
  BoundaryDirection ed{{chart_pt(tri, 0.55L, 0), std::nullopt}, b};
  const Real o20 = busemann_limit_oracle(tri, ed, b, w2, 20);
  const Real o30 = busemann_limit_oracle(tri, ed, b, w2, 30);
  CHECK(std::abs(o20 - o30) <= 1e-7L);
}

TEST_CASE("busemann cocycle, antisymmetry, bound") {
  auto disk = ConvexDomain::ellipsoid(2);
  Rng rng(404);
  for (int trial = 0; trial < 120; ++trial) {
    ProjPoint x = disk.from_chart(rand_disk_pt(rng));
    ProjPoint y = disk.from_chart(rand_disk_pt(rng));
    ProjPoint w = disk.from_chart(rand_disk_pt(rng));
    BoundaryDirection xi{circle_pt(disk, rng.uniform(0, 6.28318L)), x};
    const Real bxy = busemann(disk, xi, x, y);
    const Real byw = busemann(disk, xi, y, w);
    const Real bxw = busemann(disk, xi, x, w);
    CHECK(std::abs(bxy + byw - bxw) <= 1e-9L);
    CHECK(std::abs(bxy + busemann(disk, xi, y, x)) <= 1e-9L);
    CHECK(std::abs(bxy) <= hilbert_distance(disk, x, y) + 1e-9L);
  }
}

TEST_CASE("busemann equivariance under disk isometries") {
  auto disk = ConvexDomain::ellipsoid(2);
  Rng rng(606);
  for (int trial = 0; trial < 60; ++trial) {
    ProjPoint x = disk.from_chart(rand_disk_pt(rng));
    ProjPoint y = disk.from_chart(rand_disk_pt(rng));
    BoundaryPoint xi = circle_pt(disk, rng.uniform(0, 6.28318L));
    ProjTransform B = disk_boost(rng.uniform(-1, 1), rng.uniform(0, 3.14159L));
    const Real before = busemann(disk, {xi, x}, x, y);
    BoundaryPoint xi_t{apply(B, xi.point), std::nullopt};
    const Real after = busemann(disk, {xi_t, apply(B, x)}, apply(B, x), apply(B, y));
    CHECK(std::abs(before - after) <= 1e-8L);
  }
}

TEST_CASE("busemann continuity along the circle") {
  auto disk = ConvexDomain::ellipsoid(2);
  ProjPoint x = chart_pt(disk, 0.2L, -0.1L);
  ProjPoint y = chart_pt(disk, -0.3L, 0.4L);
  const Real at0 = busemann(disk, {circle_pt(disk, 0.5L), x}, x, y);
  const Real at1 = busemann(disk, {circle_pt(disk, 0.5L + 1e-5L), x}, x, y);
  CHECK(std::abs(at0 - at1) <= 1e-4L);
}

TEST_CASE("busemann rejects flat boundary points") {
  auto tri = ConvexDomain::simplex(2);
  ProjPoint x = chart_pt(tri, 0.3L, 0.3L);
  ProjPoint y = chart_pt(tri, 0.2L, 0.4L);
  try {
    busemann(tri, {{chart_pt(tri, 0, 0), std::nullopt}, x}, x, y);  // vertex: not proper
    FAIL("expected NotProperExtremal");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotProperExtremal);
  }
  try {
    busemann(tri, {{chart_pt(tri, 0.5L, 0), std::nullopt}, x}, x, y);  // edge: not extremal
    FAIL("expected NotProperExtremal");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotProperExtremal);
  }
}

TEST_CASE("horosphere points") {
  auto disk = ConvexDomain::ellipsoid(2);
  ProjPoint o = chart_pt(disk, 0, 0);
  BoundaryDirection xi{circle_pt(disk, 0), o};

  CHECK(horosphere_point(disk, xi, o, o).approx_equal(o, 1e-7L));

  ProjPoint w = chart_pt(disk, 0, 0.5L);
  ProjPoint h = horosphere_point(disk, xi, o, w);
  CHECK(std::abs(busemann(disk, xi, o, h)) <= 1e-8L);

  // equivariance: the transformed problem is solved by the transformed point
  ProjTransform B = disk_boost(0.6L, 0.9L);
  ProjPoint h2 = horosphere_point(disk, {{apply(B, xi.target.point), std::nullopt}, apply(B, o)},
                                  apply(B, o), apply(B, w));
  CHECK(h2.approx_equal(apply(B, h), 1e-7L));
}

TEST_CASE("shadow membership") {
  auto disk = ConvexDomain::ellipsoid(2);
  ProjPoint o = chart_pt(disk, 0, 0);
  ProjPoint y = chart_pt(disk, 0.9L, 0);
  CHECK(shadow_contains(disk, o, y, 0.1L, circle_pt(disk, 0)));
  CHECK_FALSE(shadow_contains(disk, o, y, 0.1L, circle_pt(disk, 3.14159265L)));

  // forward endpoint of the line through x and y is always in the shadow
  Rng rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    ProjPoint x = disk.from_chart(rand_disk_pt(rng));
    ProjPoint w = disk.from_chart(rand_disk_pt(rng));
    if (x.approx_equal(w, 1e-3L)) continue;
    auto [a, b] = line_hits(disk, x, w);
    CHECK(shadow_contains(disk, x, w, 0.05L, b));
  }
}

TEST_CASE("shadow busemann bounds") {
  auto disk = ConvexDomain::ellipsoid(2);
  ProjPoint o = chart_pt(disk, 0, 0);

  // y on the ray: upper bound tight
  ProjPoint y = chart_pt(disk, 0.5L, 0);
  auto tight = shadow_busemann_bound_check(disk, o, y, 0.2L, circle_pt(disk, 0));
  CHECK(tight.ok);
  CHECK(std::abs(tight.beta - tight.d) <= 1e-9L);

  Rng rng(2024);
  int checked = 0;
  while (checked < 100) {
    ProjPoint w = disk.from_chart(rand_disk_pt(rng));
    BoundaryPoint xi = circle_pt(disk, rng.uniform(0, 6.28318L));
    const Real r = rng.uniform(0.3L, 1.2L);
    if (!shadow_contains(disk, o, w, r, xi)) continue;
    auto res = shadow_busemann_bound_check(disk, o, w, r, xi);
    CHECK(res.ok);
    ++checked;
  }

  // not in the shadow: precondition violation is reported
  CHECK_THROWS_AS(shadow_busemann_bound_check(disk, o, chart_pt(disk, 0.9L, 0), 0.1L,
                                              circle_pt(disk, 3.14159265L)),
                  Error);
}

TEST_CASE("leaf relations") {
  auto disk = ConvexDomain::ellipsoid(2);
  VecC e1(2);
  e1 << 1, 0;
  auto v = make_tangent(disk, chart_pt(disk, 0, 0), e1);

  auto self = leaf_relation(disk, v, v);
  CHECK(self.relation == LeafRelation::StrongStable);
  CHECK(self.coincident);

  auto shifted = leaf_relation(disk, v, flow(disk, v, 1));
  CHECK(shifted.relation == LeafRelation::WeakStable);
  CHECK(shifted.coincident);  // same line, both endpoints agree

  // strong stable through a horosphere point
  ProjPoint w0 = chart_pt(disk, 0, 0.5L);
  BoundaryDirection xi{circle_pt(disk, 0), chart_pt(disk, 0, 0)};
  ProjPoint h = horosphere_point(disk, xi, chart_pt(disk, 0, 0), w0);
  VecC dir = disk.to_chart(xi.target.point) - disk.to_chart(h);
  auto w = make_tangent(disk, h, dir);
  auto strong = leaf_relation(disk, v, w);
  CHECK(strong.relation == LeafRelation::StrongStable);
  CHECK_FALSE(strong.coincident);

  // distinct lines through neither endpoint
  VecC e2(2);
  e2 << 0, 1;
  auto u = make_tangent(disk, chart_pt(disk, 0.3L, 0.2L), e2);
  CHECK(leaf_relation(disk, v, u).relation == LeafRelation::None);
}
