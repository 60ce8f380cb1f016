#include <catch2/catch_amalgamated.hpp>

#include "hilbert/projective.hpp"

using namespace hilbert;

namespace {

ProjPoint line_pt(Real t) {
  VecH v(2);
  v << t, 1;
  return ProjPoint::from(v);
}

// four separated points on a random line in RP^3, plus a transform that keeps
// the quadruple well-conditioned
struct LineQuad {
  ProjPoint a, x, y, b;
};

LineQuad random_quad(Rng& rng) {
  VecH u(4), w(4);
  for (int i = 0; i < 4; ++i) u[i] = rng.uniform(-1, 1);
  for (int i = 0; i < 4; ++i) w[i] = rng.uniform(-1, 1);
  u.normalize();
  w = (w - w.dot(u) * u).normalized();
  auto at = [&](Real t) { return ProjPoint::from(VecH(u + t * w)); };
  const Real j = rng.uniform(-0.05L, 0.05L);
  return {at(-2 + j), at(-0.5L + j), at(0.7L + j), at(1.9L + j)};
}

ProjTransform random_transform(Rng& rng, int n) {
  MatH m(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k <= n; ++k) m(i, k) = rng.uniform(-1, 1);
  m += 3 * MatH::Identity(n + 1, n + 1);
  return ProjTransform{m};
}

}  // namespace

TEST_CASE("cross-ratio on the affine line") {
  CHECK(cross_ratio(line_pt(-1), line_pt(0), line_pt(0.5L), line_pt(1)) ==
        Catch::Approx(3.0).epsilon(1e-14));
  CHECK(cross_ratio(line_pt(-1), line_pt(-0.5L), line_pt(0.5L), line_pt(1)) ==
        Catch::Approx(9.0).epsilon(1e-14));
  CHECK(cross_ratio(line_pt(-1), line_pt(0.3L), line_pt(0.3L), line_pt(1)) ==
        Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cross-ratio error cases") {
  VecH off(2);
  off << 0.2L, 1;
  ProjPoint p = line_pt(0.4L);
  CHECK_THROWS_AS(cross_ratio(line_pt(-1), line_pt(-1), p, line_pt(1)), Error);
  try {
    cross_ratio(line_pt(-1), line_pt(-1), p, line_pt(1));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateQuadruple);
  }
  VecH q(3), r(3), s(3), t(3);
  q << 0, 0, 1;
  r << 1, 0, 1;
  s << 0, 1, 1;
  t << 1, 1, 1;
  try {
    cross_ratio(ProjPoint::from(q), ProjPoint::from(r), ProjPoint::from(s), ProjPoint::from(t));
    FAIL("expected NonCollinear");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonCollinear);
  }
}

TEST_CASE("cross-ratio projective invariance") {
  Rng rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    auto quad = random_quad(rng);
    const Real cr = cross_ratio(quad.a, quad.x, quad.y, quad.b);
    auto T = random_transform(rng, 3);
    const Real cr2 = cross_ratio(apply(T, quad.a), apply(T, quad.x), apply(T, quad.y),
                                 apply(T, quad.b));
    CHECK(std::abs(cr2 - cr) <= 1e-9L * std::max<Real>(1, std::abs(cr)));
  }
}

TEST_CASE("cross-ratio multiplicative cocycle") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    VecH u(3), w(3);
    for (int i = 0; i < 3; ++i) u[i] = rng.uniform(-1, 1);
    for (int i = 0; i < 3; ++i) w[i] = rng.uniform(-1, 1);
    u.normalize();
    w = (w - w.dot(u) * u).normalized();
    auto at = [&](Real t) { return ProjPoint::from(VecH(u + t * w)); };
    ProjPoint a = at(-2), x = at(-0.6L), y = at(0.1L), z = at(0.8L), b = at(2.1L);
    const Real lhs = cross_ratio(a, x, y, b) * cross_ratio(a, y, z, b);
    const Real rhs = cross_ratio(a, x, z, b);
    CHECK(std::abs(lhs - rhs) <= 1e-12L * std::abs(rhs));
  }
}

TEST_CASE("apply and scale invariance") {
  VecH v(3);
  v << 0.3L, -0.2L, 1;
  ProjPoint p = ProjPoint::from(v);
  ProjTransform id{MatH::Identity(3, 3)};
  CHECK(apply(id, p).approx_equal(p, 1e-15L));
  ProjTransform twice{MatH(2 * MatH::Identity(3, 3))};
  CHECK(apply(twice, p).approx_equal(p, 1e-15L));
}

TEST_CASE("canonicalize fixes scale and sign") {
  Rng rng(5);
  auto T = random_transform(rng, 2);
  auto c1 = canonicalize(T);
  CHECK(std::abs(c1.m.norm() - 1) <= 1e-15L);
  auto c2 = canonicalize(ProjTransform{MatH(-3 * T.m)});
  CHECK((c1.m - c2.m).norm() <= 1e-13L);
  auto c3 = canonicalize(c1);
  CHECK((c1.m - c3.m).norm() <= 1e-15L);
  ProjTransform id{MatH::Identity(3, 3)};
  CHECK((canonicalize(id).m - MatH::Identity(3, 3) / std::sqrt((Real)3)).norm() <= 1e-15L);
  MatH sing = MatH::Zero(3, 3);
  sing(0, 0) = 1;
  CHECK_THROWS_AS(canonicalize(ProjTransform{sing}), Error);
}

TEST_CASE("affine chart round trips") {
  auto chart = AffineChart::standard(2);
  VecC z(2);
  z << 0.37L, -0.81L;
  VecH lifted = chart.lift(z);
  CHECK(std::abs(chart.eval(lifted) - 1) <= 1e-18L);
  CHECK((chart.to_chart(ProjPoint::from(lifted)) - z).norm() <= 1e-15L);

  RowH f(3);
  f << 1, 1, 1;
  auto simplex_chart = AffineChart::from_functional(f);
  VecC u(2);
  u << 0.2L, 0.5L;
  CHECK((simplex_chart.to_chart(ProjPoint::from(simplex_chart.lift(u))) - u).norm() <= 1e-15L);

  // homogeneous form of an affine functional agrees on lifted points
  RowC a(2);
  a << 2, -1;
  const Real c = 0.3L;
  RowH g = simplex_chart.homogeneous_covector(a, c);
  CHECK(std::abs(g * simplex_chart.lift(u) - (a * u + c)) <= 1e-15L);
}

TEST_CASE("projective point canonical form") {
  VecH v(3);
  v << -0.4L, 0.2L, -1;
  ProjPoint p = ProjPoint::from(v);
  ProjPoint q = ProjPoint::from(VecH(-2.5L * v));
  CHECK(p.approx_equal(q, 1e-15L));
  CHECK(std::abs(p.v.norm() - 1) <= 1e-18L);
}

TEST_CASE("deterministic rng streams") {
  Rng a(123), b(123);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng parent(9);
  Rng f0 = parent.fork(0), f1 = parent.fork(1);
  CHECK(f0.next_u64() != f1.next_u64());
}
