#pragma once

// Discrete matrix groups acting on a convex domain: presentations with
// auto-added inverses, isometry-type classification, and limit-set hulls
// recovered from attracting fixed points.

#include "hilbert/domain.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <string>

namespace hilbert {

namespace detail {

// canonical scale/sign without the invertibility audit, for hot paths
inline void canonical_form_fast(MatH& m) {
  m /= m.norm();
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) {
      const Real e = m(r, c);
      if (std::abs(e) > eps_geom) {
        if (e < 0) m = -m;
        return;
      }
    }
}

}  // namespace detail

struct GroupPresentation {
  std::vector<MatH> generators;  // raw matrices, inverses included, deduped
  std::string label;
  int n = 0;  // chart dimension of the matrices

  bool trivial() const { return generators.empty(); }
};

inline GroupPresentation make_group(const std::vector<MatH>& gens, std::string label) {
  GroupPresentation g;
  g.label = std::move(label);
  std::vector<MatH> canon;
  auto push_unique = [&](const MatH& m) {
    MatH c = canonicalize(ProjTransform{m}).m;  // validates invertibility
    for (const auto& seen : canon)
      if ((seen - c).norm() <= 1e-10L) return;
    canon.push_back(std::move(c));
    g.generators.push_back(m);
  };
  for (const auto& m : gens) {
    require(m.rows() == m.cols() && m.rows() >= 2, Errc::BadDomain, "generator must be square");
    push_unique(m);
  }
  for (const auto& m : gens) push_unique(Eigen::FullPivLU<MatH>(m).inverse());
  if (!g.generators.empty()) g.n = static_cast<int>(g.generators.front().rows()) - 1;
  return g;
}

inline void validate_preserves_domain(const ConvexDomain& om, const MatH& m, Rng& rng) {
  const int n = om.n;
  for (int trial = 0; trial < 32; ++trial) {
    VecC z(n);
    if (om.is_polytopal()) {
      Real total = 0;
      std::vector<Real> w(om.poly.vertices.size());
      for (auto& wi : w) total += (wi = -std::log(rng.uniform(1e-6L, 1)));
      z.setZero();
      for (std::size_t i = 0; i < w.size(); ++i) z += (w[i] / total) * om.poly.vertices[i];
      VecC mean = VecC::Zero(n);
      for (const auto& v : om.poly.vertices) mean += v;
      mean /= Real(om.poly.vertices.size());
      z = mean + 0.9L * (z - mean);
    } else {
      VecC u(n);
      do {
        for (int i = 0; i < n; ++i) u[i] = rng.uniform(-1, 1);
      } while (u.norm() > 0.9L);
      Eigen::LLT<MatC> llt(om.ell.shape);
      z = om.ell.center + llt.matrixL().transpose().solve(u);
    }
    VecH image = m * om.chart.lift(z);
    const Real scale = om.chart.eval(image);
    require(std::abs(scale) > eps_geom * image.norm(), Errc::DomainNotPreserved,
            "generator sends an interior point to chart infinity");
    if (om.is_polytopal()) {
      VecH q = image / scale;
      for (const auto& gcov : om.poly.facets)
        require(gcov * q > 1e-9L, Errc::DomainNotPreserved,
                "generator maps an interior point outside the domain");
    } else {
      VecC zi = (image / scale).head(n);
      require(om.quadric(zi) < -1e-9L, Errc::DomainNotPreserved,
              "generator maps an interior point outside the domain");
    }
  }
}

struct ElementClass {
  enum Kind { Hyperbolic, FlatType, Other } kind = Other;
  std::optional<ProjPoint> fix_plus, fix_minus;
};

namespace detail {

// real eigenlines of m as projective points, paired with |eigenvalue|
inline std::vector<std::pair<Real, ProjPoint>> real_eigenlines(const MatH& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.cast<double>());
  std::vector<std::pair<Real, ProjPoint>> out;
  for (int i = 0; i < m.rows(); ++i) {
    const auto lam = es.eigenvalues()[i];
    if (std::abs(lam.imag()) > 1e-10 * std::abs(lam)) continue;
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    int pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    v /= v[pivot];
    if (v.imag().norm() > 1e-8 * v.real().norm()) continue;
    VecH real_v = v.real().cast<Real>();
    out.emplace_back(std::abs(lam.real()), ProjPoint::from(real_v));
  }
  return out;
}

}  // namespace detail

// Hyperbolic iff biproximal (simple top and bottom eigenvalue moduli) with
// both eigenline points proper extremal boundary points; FlatType iff fixed
// boundary points exist but some fails proper/extremal; Other otherwise.
inline ElementClass classify_element(const ConvexDomain& om, const ProjTransform& T) {
  {
    Rng rng(0x9e3779b97f4a7c15ull);
    validate_preserves_domain(om, T.m, rng);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(T.m.cast<double>());
  const int dim = static_cast<int>(T.m.rows());
  std::vector<Real> moduli(dim);
  for (int i = 0; i < dim; ++i) moduli[i] = std::abs(es.eigenvalues()[i]);
  std::vector<int> order(dim);
  for (int i = 0; i < dim; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return moduli[a] > moduli[b]; });

  auto eigen_point = [&](int idx) -> std::optional<ProjPoint> {
    const auto lam = es.eigenvalues()[idx];
    if (std::abs(lam.imag()) > 1e-10 * std::abs(lam)) return std::nullopt;
    Eigen::VectorXcd v = es.eigenvectors().col(idx);
    int pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    v /= v[pivot];
    if (v.imag().norm() > 1e-8 * v.real().norm()) return std::nullopt;
    return ProjPoint::from(VecH(v.real().cast<Real>()));
  };

  ElementClass out;
  const Real top_gap = moduli[order[0]] - moduli[order[1]];
  const Real bot_gap = moduli[order[dim - 2]] - moduli[order[dim - 1]];
  const bool biproximal =
      top_gap > 1e-6L * moduli[order[0]] && bot_gap > 1e-6L * moduli[order[0]];
  if (biproximal) {
    auto fp = eigen_point(order[0]);
    auto fm = eigen_point(order[dim - 1]);
    if (fp && fm && on_boundary(om, *fp) && on_boundary(om, *fm)) {
      auto cp = classify_boundary(om, {*fp, std::nullopt});
      auto cm = classify_boundary(om, {*fm, std::nullopt});
      if (cp.proper && cp.extremal && cm.proper && cm.extremal) {
        out.kind = ElementClass::Hyperbolic;
        out.fix_plus = *fp;
        out.fix_minus = *fm;
        return out;
      }
    }
  }
  bool any_fixed_boundary = false, any_degenerate = false;
  for (auto& [mod, p] : detail::real_eigenlines(T.m)) {
    if (!on_boundary(om, p)) continue;
    any_fixed_boundary = true;
    auto c = classify_boundary(om, {p, std::nullopt});
    if (!c.proper || !c.extremal) any_degenerate = true;
  }
  out.kind = (any_fixed_boundary && any_degenerate) ? ElementClass::FlatType : ElementClass::Other;
  return out;
}

namespace detail {

// metric-free closure of the generating set up to the given word length,
// deduped by quantized canonical form
inline std::vector<MatH> enumerate_elements(const GroupPresentation& gp, int depth,
                                            std::size_t cap = 200000) {
  std::vector<MatH> elements;
  std::vector<std::string> keys;
  auto key_of = [&](const MatH& m) {
    MatH c = m;
    canonical_form_fast(c);
    std::string k;
    k.reserve(c.size() * 8);
    for (int col = 0; col < c.cols(); ++col)
      for (int row = 0; row < c.rows(); ++row) {
        const long long q = llroundl(c(row, col) / 1e-8L);
        k.append(reinterpret_cast<const char*>(&q), 8);
      }
    return k;
  };
  auto seen = [&](const std::string& k) {
    for (const auto& s : keys)
      if (s == k) return true;
    return false;
  };
  const int dim = gp.n + 1;
  elements.push_back(MatH::Identity(dim, dim));
  keys.push_back(key_of(elements[0]));
  std::size_t layer_begin = 0;
  for (int d = 0; d < depth; ++d) {
    const std::size_t layer_end = elements.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i)
      for (const auto& g : gp.generators) {
        MatH prod = g * elements[i];
        std::string k = key_of(prod);
        if (seen(k)) continue;
        require(elements.size() < cap, Errc::FrontierOverflow, "element cap exceeded");
        elements.push_back(std::move(prod));
        keys.push_back(std::move(k));
      }
    if (elements.size() == layer_end) break;
    layer_begin = layer_end;
  }
  return elements;
}

// 2d convex hull, monotone chain, returns counterclockwise vertex cycle
inline std::vector<VecC> hull_2d(std::vector<VecC> pts) {
  std::sort(pts.begin(), pts.end(), [](const VecC& a, const VecC& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const VecC& a, const VecC& b) { return (a - b).norm() <= 1e-12L; }),
            pts.end());
  const auto cross = [](const VecC& o, const VecC& a, const VecC& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  if (pts.size() < 3) return pts;
  std::vector<VecC> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace detail

// Approximate limit set: convex hull of the attracting eigenlines of all
// enumerated elements with a simple dominant eigenvalue. The seed point must
// end up interior to the hull; it orients the facet covectors.
inline ConvexDomain limit_set_hull(const GroupPresentation& gp, int depth, const ProjPoint& seed) {
  const int n = gp.trivial() ? static_cast<int>(seed.v.size()) - 1 : gp.n;
  require(n == 2 || n == 3, Errc::BadDomain, "limit_set_hull supports chart dimensions 2 and 3");
  AffineChart chart = AffineChart::standard(n);
  std::vector<VecC> points;
  for (const auto& m : detail::enumerate_elements(gp, depth)) {
    auto lines = detail::real_eigenlines(m);
    if (lines.empty()) continue;
    std::sort(lines.begin(), lines.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    Real second = 0;
    {
      Eigen::EigenSolver<Eigen::MatrixXd> es(m.cast<double>());
      std::vector<Real> mods;
      for (int i = 0; i < m.rows(); ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
      std::sort(mods.rbegin(), mods.rend());
      second = mods[1];
    }
    if (lines.front().first - second <= 1e-6L * lines.front().first) continue;
    const ProjPoint& p = lines.front().second;
    if (std::abs(chart.eval(p.v)) <= eps_geom * p.v.norm()) continue;
    points.push_back(chart.to_chart(p));
  }
  require(!points.empty(), Errc::NoDominantEigenvalue,
          "no enumerated element has a dominant eigenvalue");
  require(points.size() >= static_cast<std::size_t>(n) + 2, Errc::DegenerateLimitSet,
          "too few attracting fixed points");

  if (n == 2) {
    auto hull = detail::hull_2d(points);
    require(hull.size() >= 3, Errc::DegenerateLimitSet, "hull is not full-dimensional");
    std::vector<RowH> facets;
    const VecC zs = chart.to_chart(seed);
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const VecC& a = hull[i];
      const VecC& b = hull[(i + 1) % hull.size()];
      RowC normal(2);
      normal << -(b[1] - a[1]), b[0] - a[0];  // inward for a ccw cycle
      Real c = -(normal * a);
      if (normal * zs + c < 0) {
        normal = -normal;
        c = -c;
      }
      require(normal * zs + c > eps_geom, Errc::DegenerateLimitSet, "seed not interior to hull");
      facets.push_back(chart.homogeneous_covector(normal, c));
    }
    return ConvexDomain::polytope_homogeneous(std::move(facets), std::move(hull), chart);
  }

  // n == 3: brute-force facet scan over a farthest-point thinning
  std::vector<VecC> thin;
  for (const auto& p : points) {
    bool fresh = true;
    for (const auto& q : thin)
      if ((p - q).norm() <= 1e-9L) fresh = false;
    if (fresh) thin.push_back(p);
  }
  if (thin.size() > 48) {
    std::vector<VecC> keep;
    keep.push_back(thin[0]);
    while (keep.size() < 48) {
      std::size_t best = 0;
      Real best_d = -1;
      for (std::size_t i = 0; i < thin.size(); ++i) {
        Real dmin = std::numeric_limits<Real>::max();
        for (const auto& q : keep) dmin = std::min(dmin, (thin[i] - q).norm());
        if (dmin > best_d) best_d = dmin, best = i;
      }
      keep.push_back(thin[best]);
    }
    thin = std::move(keep);
  }
  const VecC zs = chart.to_chart(seed);
  std::vector<RowH> facets;
  std::vector<VecC> verts;
  std::vector<char> used(thin.size(), 0);
  const std::size_t k = thin.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      for (std::size_t l = j + 1; l < k; ++l) {
        VecC u = thin[j] - thin[i], w = thin[l] - thin[i];
        Eigen::Matrix<Real, 3, 1> nrm = Eigen::Matrix<Real, 3, 1>(u).cross(Eigen::Matrix<Real, 3, 1>(w));
        if (nrm.norm() <= 1e-12L) continue;
        nrm.normalize();
        Real c = -nrm.dot(thin[i]);
        Real side = nrm.dot(zs) + c;
        if (side < 0) {
          nrm = -nrm;
          c = -c;
          side = -side;
        }
        if (side <= eps_geom) continue;
        bool facet = true;
        for (std::size_t t = 0; t < k && facet; ++t)
          if (nrm.dot(thin[t]) + c < -1e-9L) facet = false;
        if (!facet) continue;
        RowC a = nrm.transpose();
        facets.push_back(chart.homogeneous_covector(a, c));
        for (std::size_t t : {i, j, l})
          if (!used[t]) {
            used[t] = 1;
            verts.push_back(thin[t]);
          }
      }
  require(facets.size() >= 4 && verts.size() >= 4, Errc::DegenerateLimitSet,
          "hull is not full-dimensional");
  return ConvexDomain::polytope_homogeneous(std::move(facets), std::move(verts), chart);
}

}  // namespace hilbert
