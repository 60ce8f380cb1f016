#pragma once

// Homogeneous coordinates, projective maps, affine charts, and the cross-ratio.

#include "hilbert/core.hpp"

#include <Eigen/SVD>

namespace hilbert {

// Canonical representative: unit Euclidean norm, first entry with
// |entry| > eps_geom made positive. Equality of ProjPoints is equality of
// canonical forms within tolerance.
inline void canonicalize_vector(VecH& v) {
  Real n = v.norm();
  require(n > 0, Errc::SingularMatrix, "zero homogeneous vector");
  v /= n;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > eps_geom) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

struct ProjPoint {
  VecH v;  // canonical

  ProjPoint() = default;

  static ProjPoint from(VecH raw) {
    canonicalize_vector(raw);
    ProjPoint p;
    p.v = std::move(raw);
    return p;
  }

  int dim() const { return static_cast<int>(v.size()) - 1; }

  bool approx_equal(const ProjPoint& o, Real tol = 1e-8L) const {
    return (v - o.v).norm() <= tol || (v + o.v).norm() <= tol;
  }
};

struct ProjTransform {
  MatH m;  // raw matrix, invertible; canonical form is produced on demand

  ProjTransform() = default;
  explicit ProjTransform(MatH mat) : m(std::move(mat)) {}

  int dim() const { return static_cast<int>(m.rows()) - 1; }

  ProjTransform inverse() const {
    Eigen::FullPivLU<MatH> lu(m);
    require(lu.isInvertible(), Errc::SingularMatrix, "transform not invertible");
    return ProjTransform(lu.inverse());
  }
};

inline ProjPoint apply(const ProjTransform& T, const ProjPoint& p) {
  return ProjPoint::from(T.m * p.v);
}

// Unit Frobenius norm, sign fixed by the first entry exceeding eps_geom
// relative to the norm; lambda*T maps to the same output for all lambda != 0.
inline ProjTransform canonicalize(const ProjTransform& T) {
  Real n = T.m.norm();
  require(n > 0, Errc::SingularMatrix, "zero matrix");
  Eigen::FullPivLU<MatH> lu(T.m);
  require(std::abs(lu.determinant()) > 1e-30L * std::pow(n, T.m.rows()),
          Errc::SingularMatrix, "transform is numerically singular");
  MatH c = T.m / n;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (std::abs(c(i, j)) > eps_geom) {
        if (c(i, j) < 0) c = -c;
        return ProjTransform(std::move(c));
      }
    }
  }
  return ProjTransform(std::move(c));
}

// Affine chart given by a covector f: the representative of p with f(p) = 1,
// whose first n coordinates serve as chart coordinates. Requires f[n] != 0 so
// that chart coordinates can be lifted back.
struct AffineChart {
  RowH f;

  static AffineChart standard(int n) {
    AffineChart c;
    c.f = RowH::Zero(n + 1);
    c.f[n] = 1;
    return c;
  }

  static AffineChart from_functional(RowH functional) {
    require(functional.size() >= 2 && std::abs(functional[functional.size() - 1]) > eps_geom,
            Errc::ChartUndefined, "chart functional needs a nonzero last entry");
    AffineChart c;
    c.f = std::move(functional);
    return c;
  }

  int dim() const { return static_cast<int>(f.size()) - 1; }

  Real eval(const VecH& v) const { return f * v; }

  // normalized homogeneous representative, f(result) = 1
  VecH normalize(const VecH& v) const {
    Real s = eval(v);
    require(std::abs(s) > eps_geom * v.norm(), Errc::ChartUndefined,
            "point at infinity of the chart");
    return v / s;
  }

  VecC to_chart(const ProjPoint& p) const { return normalize(p.v).head(dim()); }

  VecH lift(const VecC& x) const {
    int n = dim();
    VecH v(n + 1);
    v.head(n) = x;
    v[n] = (Real(1) - f.head(n) * x) / f[n];
    return v;
  }

  ProjPoint from_chart(const VecC& x) const { return ProjPoint::from(lift(x)); }

  // homogeneous covector of the affine form a.x + c on chart coordinates
  RowH homogeneous_covector(const RowC& a, Real c) const {
    RowH g = c * f;
    g.head(a.size()) += a;
    return g;
  }
};

namespace detail {

// Orthonormal basis (columns) of the span of the four points, plus the
// residual ratio sigma_3/sigma_1 used for the collinearity test.
struct LineBasis {
  Eigen::Matrix<Real, Eigen::Dynamic, 2, 0, 4, 2> basis;
  Real residual;
};

inline LineBasis line_basis(const ProjPoint& a, const ProjPoint& x, const ProjPoint& y,
                            const ProjPoint& b) {
  const int m = static_cast<int>(a.v.size());
  Eigen::Matrix<Real, Eigen::Dynamic, 4, 0, 4, 4> pts(m, 4);
  pts.col(0) = a.v;
  pts.col(1) = x.v;
  pts.col(2) = y.v;
  pts.col(3) = b.v;
  Eigen::JacobiSVD<decltype(pts)> svd(pts, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  LineBasis lb;
  lb.residual = (s.size() > 2 && s[0] > 0) ? s[2] / s[0] : Real(0);
  lb.basis = svd.matrixU().leftCols(2);
  return lb;
}

}  // namespace detail

// [a:x:y:b], computed via 2x2 determinants in an orthonormal basis of the
// common line. Positive when x and y lie between a and b. The value does not
// depend on the choice of canonical representatives: each point enters once
// in the numerator and once in the denominator, so sign flips cancel.
inline Real cross_ratio(const ProjPoint& a, const ProjPoint& x, const ProjPoint& y,
                        const ProjPoint& b) {
  auto lb = detail::line_basis(a, x, y, b);
  require(lb.residual <= eps_geom, Errc::NonCollinear, "points do not span a line");
  auto coord = [&](const ProjPoint& p) {
    return Eigen::Matrix<Real, 2, 1>(lb.basis.transpose() * p.v);
  };
  const auto ca = coord(a), cx = coord(x), cy = coord(y), cb = coord(b);
  auto det = [](const Eigen::Matrix<Real, 2, 1>& p, const Eigen::Matrix<Real, 2, 1>& q) {
    return p[0] * q[1] - p[1] * q[0];
  };
  const Real d_ax = det(ca, cx), d_yb = det(cy, cb);
  require(std::abs(d_ax) > eps_geom && std::abs(d_yb) > eps_geom, Errc::DegenerateQuadruple,
          "coincident endpoint pair in cross-ratio");
  return (det(ca, cy) * det(cx, cb)) / (d_ax * d_yb);
}

}  // namespace hilbert
