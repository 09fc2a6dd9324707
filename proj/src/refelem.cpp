#include "hdgflow/refelem.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace hdgflow {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  QuadratureRule rule;
  rule.points.resize(n, 1);
  rule.weights.resize(n);
  // Newton iteration on Legendre polynomials, symmetric initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      pp = n * (x * pn - p0) / (x * x - 1.0);
      const double dx = pn / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.points(i, 0) = -std::abs(x);
    rule.points(n - 1 - i, 0) = std::abs(x);
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.points((n - 1) / 2, 0) = 0.0;
  return rule;
}

QuadratureRule quadrature_rule(ElemType domain, int exactness) {
  if (exactness < 1) throw std::invalid_argument("quadrature_rule: exactness >= 1 required");
  if (exactness > 60) throw std::invalid_argument("quadrature_rule: exactness degree unavailable");
  QuadratureRule rule;
  if (domain == ElemType::segment) {
    return gauss_legendre((exactness + 2) / 2);
  }
  if (domain == ElemType::quad) {
    const QuadratureRule g = gauss_legendre((exactness + 2) / 2);
    const int n = static_cast<int>(g.weights.size());
    rule.points.resize(n * n, 2);
    rule.weights.resize(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        rule.points(i * n + j, 0) = g.points(j, 0);
        rule.points(i * n + j, 1) = g.points(i, 0);
        rule.weights(i * n + j) = g.weights(i) * g.weights(j);
      }
    return rule;
  }
  // Triangle: Duffy transform (u, v) in [0,1]^2 -> (u, v(1-u)), jacobian 1-u.
  // The collapsed integrand of a degree-d polynomial has degree <= d+1 per
  // direction, so n = ceil((d+2)/2) Gauss points suffice.
  const QuadratureRule g = gauss_legendre((exactness + 3) / 2);
  const int n = static_cast<int>(g.weights.size());
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (g.points(i, 0) + 1.0);
    const double wu = 0.5 * g.weights(i);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (g.points(j, 0) + 1.0);
      const double wv = 0.5 * g.weights(j);
      rule.points(i * n + j, 0) = u;
      rule.points(i * n + j, 1) = v * (1.0 - u);
      rule.weights(i * n + j) = wu * wv * (1.0 - u);
    }
  }
  return rule;
}

namespace {

Eigen::MatrixXi monomial_powers(ElemType type, int k) {
  std::vector<std::array<int, 2>> pw;
  if (type == ElemType::segment) {
    Eigen::MatrixXi powers(k + 1, 1);
    for (int a = 0; a <= k; ++a) powers(a, 0) = a;
    return powers;
  }
  if (type == ElemType::simplex) {
    for (int d = 0; d <= k; ++d)
      for (int a = d; a >= 0; --a) pw.push_back({a, d - a});
  } else {
    for (int b = 0; b <= k; ++b)
      for (int a = 0; a <= k; ++a) pw.push_back({a, b});
  }
  Eigen::MatrixXi powers(static_cast<int>(pw.size()), 2);
  for (size_t t = 0; t < pw.size(); ++t) {
    powers(static_cast<int>(t), 0) = pw[t][0];
    powers(static_cast<int>(t), 1) = pw[t][1];
  }
  return powers;
}

Eigen::MatrixXd monomials_at(const Eigen::MatrixXi& powers, const Eigen::MatrixXd& pts) {
  const int npts = static_cast<int>(pts.rows());
  const int nterms = static_cast<int>(powers.rows());
  const int dim = static_cast<int>(powers.cols());
  Eigen::MatrixXd M(npts, nterms);
  for (int p = 0; p < npts; ++p)
    for (int t = 0; t < nterms; ++t) {
      double v = 1.0;
      for (int d = 0; d < dim; ++d) v *= std::pow(pts(p, d), powers(t, d));
      M(p, t) = v;
    }
  return M;
}

Eigen::MatrixXd monomial_derivs_at(const Eigen::MatrixXi& powers, const Eigen::MatrixXd& pts,
                                   int dir) {
  const int npts = static_cast<int>(pts.rows());
  const int nterms = static_cast<int>(powers.rows());
  const int dim = static_cast<int>(powers.cols());
  Eigen::MatrixXd M(npts, nterms);
  for (int p = 0; p < npts; ++p)
    for (int t = 0; t < nterms; ++t) {
      const int a = powers(t, dir);
      if (a == 0) {
        M(p, t) = 0.0;
        continue;
      }
      double v = a;
      for (int d = 0; d < dim; ++d) {
        const int e = (d == dir) ? powers(t, d) - 1 : powers(t, d);
        v *= std::pow(pts(p, d), e);
      }
      M(p, t) = v;
    }
  return M;
}

Eigen::MatrixXd segment_nodes(int k) {
  Eigen::MatrixXd nodes(k + 1, 1);
  nodes(0, 0) = -1.0;
  nodes(1, 0) = 1.0;
  for (int i = 1; i < k; ++i) nodes(1 + i, 0) = -1.0 + 2.0 * i / k;
  return nodes;
}

}  // namespace

std::vector<int> ReferenceElement::segment_reversal(int degree) {
  std::vector<int> perm(degree + 1);
  perm[0] = 1;
  perm[1] = 0;
  for (int i = 2; i <= degree; ++i) perm[i] = degree + 2 - i;
  return perm;
}

Eigen::MatrixXd ReferenceElement::eval(const Eigen::MatrixXd& pts) const {
  return monomials_at(powers, pts) * coeff;
}

std::vector<Eigen::MatrixXd> ReferenceElement::eval_grad(const Eigen::MatrixXd& pts) const {
  std::vector<Eigen::MatrixXd> g;
  for (int d = 0; d < nsd; ++d) g.push_back(monomial_derivs_at(powers, pts, d) * coeff);
  return g;
}

Eigen::MatrixXd ReferenceElement::face_point_coords(int face, const Eigen::VectorXd& s) const {
  if (face < 0 || face >= nfaces) throw std::invalid_argument("face_point_coords: bad face index");
  Eigen::MatrixXd corners(nfaces, 2);
  if (type == ElemType::simplex)
    corners << 0, 0, 1, 0, 0, 1;
  else
    corners << -1, -1, 1, -1, 1, 1, -1, 1;
  const Eigen::RowVector2d c0 = corners.row(face);
  const Eigen::RowVector2d c1 = corners.row((face + 1) % nfaces);
  Eigen::MatrixXd pts(s.size(), 2);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    pts.row(i) = c0 + 0.5 * (s(i) + 1.0) * (c1 - c0);
  return pts;
}

ReferenceElement reference_element(ElemType type, int k) {
  if (k < 1) throw std::invalid_argument("reference_element: degree >= 1 required");
  if (k > 10) throw std::invalid_argument("reference_element: degree not supported");
  ReferenceElement re;
  re.type = type;
  re.degree = k;

  if (type == ElemType::segment) {
    re.nsd = 1;
    re.nen = k + 1;
    re.nodes = segment_nodes(k);
    re.nfaces = 0;
    re.nfn = 0;
  } else if (type == ElemType::simplex) {
    re.nsd = 2;
    re.nen = (k + 1) * (k + 2) / 2;
    re.nodes.resize(re.nen, 2);
    int idx = 0;
    auto put = [&](double a, double b) { re.nodes.row(idx++) << a, b; };
    put(0, 0);
    put(1, 0);
    put(0, 1);
    for (int i = 1; i < k; ++i) put(static_cast<double>(i) / k, 0.0);             // edge 0
    for (int i = 1; i < k; ++i) put(1.0 - static_cast<double>(i) / k, static_cast<double>(i) / k);  // edge 1
    for (int i = 1; i < k; ++i) put(0.0, 1.0 - static_cast<double>(i) / k);       // edge 2
    for (int j = 1; j < k; ++j)
      for (int i = 1; i + j < k; ++i) put(static_cast<double>(i) / k, static_cast<double>(j) / k);
    re.nfaces = 3;
  } else {
    re.nsd = 2;
    re.nen = (k + 1) * (k + 1);
    re.nodes.resize(re.nen, 2);
    int idx = 0;
    auto put = [&](double a, double b) { re.nodes.row(idx++) << a, b; };
    put(-1, -1);
    put(1, -1);
    put(1, 1);
    put(-1, 1);
    auto t = [&](int i) { return -1.0 + 2.0 * i / k; };
    for (int i = 1; i < k; ++i) put(t(i), -1);   // edge 0
    for (int i = 1; i < k; ++i) put(1, t(i));    // edge 1
    for (int i = 1; i < k; ++i) put(-t(i), 1);   // edge 2 (towards corner 3)
    for (int i = 1; i < k; ++i) put(-1, -t(i));  // edge 3
    for (int j = 1; j < k; ++j)
      for (int i = 1; i < k; ++i) put(t(i), t(j));
    re.nfaces = 4;
  }

  if (re.nsd == 2) {
    re.nfn = k + 1;
    re.face_nodes.assign(re.nfaces, {});
    for (int f = 0; f < re.nfaces; ++f) {
      std::vector<int>& fn = re.face_nodes[f];
      fn.push_back(f);
      fn.push_back((f + 1) % re.nfaces);
      const int base = re.nfaces + f * (k - 1);
      for (int i = 0; i < k - 1; ++i) fn.push_back(base + i);
    }
  }

  re.powers = monomial_powers(type, k);
  const Eigen::MatrixXd V = monomials_at(re.powers, re.nodes);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
  if (!lu.isInvertible())
    throw std::runtime_error("reference_element: singular Vandermonde matrix");
  re.coeff = lu.inverse();

  re.quad = quadrature_rule(type, 2 * k + 2);
  re.N = re.eval(re.quad.points);
  re.dN = re.eval_grad(re.quad.points);
  return re;
}

MappedGeometry map_element_tabulated(const Eigen::MatrixXd& coords, const Eigen::MatrixXd& N,
                                     const std::vector<Eigen::MatrixXd>& dN) {
  if (N.cols() != coords.rows())
    throw std::invalid_argument("map_element: nodal coordinate count must equal nen");
  const int npts = static_cast<int>(N.rows());
  const int nsd = static_cast<int>(coords.cols());
  MappedGeometry geo;
  geo.x = N * coords;
  geo.detJ.resize(npts);
  geo.J.reserve(npts);
  geo.grad.reserve(npts);
  for (int g = 0; g < npts; ++g) {
    Eigen::MatrixXd J(nsd, nsd);
    for (int i = 0; i < nsd; ++i)
      for (int j = 0; j < static_cast<int>(dN.size()); ++j)
        J(i, j) = dN[j].row(g).dot(coords.col(i));
    const double det = J.determinant();
    if (!(det > 0.0))
      throw std::runtime_error("map_element: non-positive Jacobian (degenerate or inverted element)");
    geo.detJ(g) = det;
    Eigen::MatrixXd Jinv = J.inverse();
    Eigen::MatrixXd gg(N.cols(), nsd);
    for (Eigen::Index a = 0; a < N.cols(); ++a)
      for (int i = 0; i < nsd; ++i) {
        double v = 0.0;
        for (int j = 0; j < nsd; ++j) v += Jinv(j, i) * dN[j](g, a);
        gg(a, i) = v;
      }
    geo.J.push_back(std::move(J));
    geo.grad.push_back(std::move(gg));
  }
  return geo;
}

MappedGeometry map_element(const Eigen::MatrixXd& coords, const ReferenceElement& re,
                           const Eigen::MatrixXd& ref_pts) {
  if (coords.rows() != re.nen)
    throw std::invalid_argument("map_element: nodal coordinate count must equal nen");
  return map_element_tabulated(coords, re.eval(ref_pts), re.eval_grad(ref_pts));
}

Eigen::MatrixXd reference_lattice(ElemType type, int n) {
  if (n < 2) throw std::invalid_argument("reference_lattice: n >= 2 required");
  std::vector<Eigen::RowVector2d> pts;
  if (type == ElemType::simplex) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i + j < n; ++i)
        pts.emplace_back(static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1));
  } else {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        pts.emplace_back(-1.0 + 2.0 * i / (n - 1), -1.0 + 2.0 * j / (n - 1));
  }
  Eigen::MatrixXd out(pts.size(), 2);
  for (size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i];
  return out;
}

}  // namespace hdgflow
