#include <doctest.h>

#include <cmath>

#include "hdgflow/refelem.hpp"

using namespace hdgflow;

namespace {

double monomial_integral_triangle(int a, int b) {
  // int over unit right triangle of x^a y^b = a! b! / (a+b+2)!
  double num = 1.0;
  for (int i = 1; i <= a; ++i) num *= i;
  for (int i = 1; i <= b; ++i) num *= i;
  double den = 1.0;
  for (int i = 1; i <= a + b + 2; ++i) den *= i;
  return num / den;
}

double monomial_integral_quad(int a, int b) {
  const auto seg = [](int p) { return p % 2 == 1 ? 0.0 : 2.0 / (p + 1); };
  return seg(a) * seg(b);
}

}  // namespace

TEST_CASE("quadrature weights sum to reference measures") {
  CHECK(quadrature_rule(ElemType::simplex, 4).weights.sum() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(quadrature_rule(ElemType::quad, 4).weights.sum() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(quadrature_rule(ElemType::segment, 4).weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(quadrature_rule(ElemType::segment, 0), std::invalid_argument);
}

TEST_CASE("segment rule integrates cubics exactly") {
  const QuadratureRule r = quadrature_rule(ElemType::segment, 3);
  double acc3 = 0.0, acc2 = 0.0;
  for (Eigen::Index g = 0; g < r.weights.size(); ++g) {
    acc3 += std::pow(r.points(g, 0), 3) * r.weights(g);
    acc2 += r.points(g, 0) * r.points(g, 0) * r.weights(g);
  }
  CHECK(std::abs(acc3) <= 1e-14);
  CHECK(acc2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));

  const QuadratureRule r4 = quadrature_rule(ElemType::segment, 4);
  double acc4 = 0.0;
  for (Eigen::Index g = 0; g < r4.weights.size(); ++g)
    acc4 += std::pow(r4.points(g, 0), 4) * r4.weights(g);
  CHECK(acc4 == doctest::Approx(2.0 / 5.0).epsilon(1e-13));
}

TEST_CASE("monomial exactness up to the requested degree") {
  for (int deg : {2, 5, 8, 11}) {
    const QuadratureRule tri = quadrature_rule(ElemType::simplex, deg);
    for (int a = 0; a + 0 <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        double acc = 0.0;
        for (Eigen::Index g = 0; g < tri.weights.size(); ++g)
          acc += std::pow(tri.points(g, 0), a) * std::pow(tri.points(g, 1), b) * tri.weights(g);
        const double exact = monomial_integral_triangle(a, b);
        CHECK(std::abs(acc - exact) <= 1e-13 * std::max(1.0, std::abs(exact)));
      }
    const QuadratureRule quad = quadrature_rule(ElemType::quad, deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; b <= deg; ++b) {
        if (a + b > deg) continue;
        double acc = 0.0;
        for (Eigen::Index g = 0; g < quad.weights.size(); ++g)
          acc += std::pow(quad.points(g, 0), a) * std::pow(quad.points(g, 1), b) * quad.weights(g);
        CHECK(std::abs(acc - monomial_integral_quad(a, b)) <= 1e-13);
      }
  }
}

TEST_CASE("reference element node counts") {
  CHECK(reference_element(ElemType::simplex, 1).nen == 3);
  CHECK(reference_element(ElemType::simplex, 2).nen == 6);
  CHECK(reference_element(ElemType::simplex, 3).nen == 10);
  CHECK(reference_element(ElemType::quad, 2).nen == 9);
  CHECK(reference_element(ElemType::segment, 3).nen == 4);
  CHECK_THROWS_AS(reference_element(ElemType::simplex, 0), std::invalid_argument);
  CHECK_THROWS_AS(reference_element(ElemType::quad, 99), std::invalid_argument);
}

TEST_CASE("P1 simplex basis at the centroid") {
  const ReferenceElement re = reference_element(ElemType::simplex, 1);
  Eigen::MatrixXd pt(1, 2);
  pt << 1.0 / 3.0, 1.0 / 3.0;
  const Eigen::MatrixXd N = re.eval(pt);
  for (int j = 0; j < 3; ++j) CHECK(N(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("partition of unity, zero gradient sum, Kronecker property") {
  for (ElemType type : {ElemType::simplex, ElemType::quad, ElemType::segment}) {
    for (int k = 1; k <= 4; ++k) {
      const ReferenceElement re = reference_element(type, k);
      for (Eigen::Index g = 0; g < re.quad.weights.size(); ++g) {
        CHECK(std::abs(re.N.row(g).sum() - 1.0) <= 1e-13);
        for (int d = 0; d < re.nsd; ++d) CHECK(std::abs(re.dN[d].row(g).sum()) <= 1e-11);
      }
      const Eigen::MatrixXd at_nodes = re.eval(re.nodes);
      CHECK((at_nodes - Eigen::MatrixXd::Identity(re.nen, re.nen)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("isoparametric map on affine elements") {
  const ReferenceElement re = reference_element(ElemType::simplex, 1);
  Eigen::MatrixXd coords(3, 2);
  coords << 0, 0, 1, 0, 0, 1;  // unit right triangle maps to itself
  const MappedGeometry geo = map_element(coords, re, re.quad.points);
  for (Eigen::Index g = 0; g < re.quad.weights.size(); ++g) {
    CHECK(geo.detJ(g) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((geo.J[g] - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-14);
  }

  Eigen::MatrixXd scaled = 2.0 * coords;
  const MappedGeometry geo2 = map_element(scaled, re, re.quad.points);
  CHECK(geo2.detJ(0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK((geo2.grad[0] - 0.5 * geo.grad[0]).cwiseAbs().maxCoeff() <= 1e-14);

  Eigen::MatrixXd collapsed(3, 2);
  collapsed << 0, 0, 0, 0, 0, 1;  // two coincident vertices
  CHECK_THROWS_AS(map_element(collapsed, re, re.quad.points), std::runtime_error);
}

TEST_CASE("degree-2k polynomial integration on an affine simplex") {
  // int over the triangle (0,0),(2,0),(0,2), via the mapped rule, of x y^2:
  // affine map x = 2 xi, y = 2 eta, detJ = 4 -> 4 * 2^3 * I_ref(1,2)
  const ReferenceElement re = reference_element(ElemType::simplex, 2);
  Eigen::MatrixXd coords = 2.0 * re.nodes;  // affine scaling places P2 nodes exactly
  const MappedGeometry geo = map_element(coords, re, re.quad.points);
  double acc = 0.0;
  for (Eigen::Index g = 0; g < re.quad.weights.size(); ++g)
    acc += geo.x(g, 0) * geo.x(g, 1) * geo.x(g, 1) * geo.detJ(g) * re.quad.weights(g);
  const double exact = 4.0 * 8.0 * monomial_integral_triangle(1, 2);
  CHECK(acc == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("segment reversal permutation") {
  const std::vector<int> p2 = ReferenceElement::segment_reversal(2);
  CHECK(p2 == std::vector<int>{1, 0, 2});
  const std::vector<int> p3 = ReferenceElement::segment_reversal(3);
  CHECK(p3 == std::vector<int>{1, 0, 3, 2});
  // N_i(-s) = N_perm(i)(s)
  const ReferenceElement seg = reference_element(ElemType::segment, 3);
  Eigen::MatrixXd pts(1, 1), neg(1, 1);
  pts << 0.37;
  neg << -0.37;
  const Eigen::MatrixXd Np = seg.eval(pts);
  const Eigen::MatrixXd Nn = seg.eval(neg);
  for (int i = 0; i < 4; ++i) CHECK(Nn(0, i) == doctest::Approx(Np(0, p3[i])).epsilon(1e-12));
}

TEST_CASE("reference lattice sizes") {
  CHECK(reference_lattice(ElemType::simplex, 4).rows() == 10);
  CHECK(reference_lattice(ElemType::quad, 4).rows() == 16);
}
