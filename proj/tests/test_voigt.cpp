#include <doctest.h>

#include <random>

#include "hdgflow/voigt.hpp"

using namespace hdgflow;

TEST_CASE("voigt dimensions") {
  const VoigtDims d2 = voigt_dims(2);
  CHECK(d2.msd == 3);
  CHECK(d2.nrr == 1);
  const VoigtDims d3 = voigt_dims(3);
  CHECK(d3.msd == 6);
  CHECK(d3.nrr == 3);
  CHECK_THROWS_AS(voigt_dims(1), std::invalid_argument);
  CHECK_THROWS_AS(voigt_dims(4), std::invalid_argument);
}

TEST_CASE("constitutive operators 2D") {
  const ConstitutiveOperators ops = constitutive_operators(1.0, 2);
  CHECK(ops.D.diagonal().isApprox(Eigen::Vector3d(2, 2, 1)));
  CHECK(ops.E.isApprox(Eigen::Vector3d(1, 1, 0)));
  CHECK(ops.Dhalf.diagonal().isApprox(Eigen::Vector3d(std::sqrt(2.0), std::sqrt(2.0), 1.0)));
  CHECK((ops.Dhalf * ops.Dhalf - ops.D).cwiseAbs().maxCoeff() == doctest::Approx(0).epsilon(1e-15));
  CHECK_THROWS_AS(constitutive_operators(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(constitutive_operators(-1.0, 3), std::invalid_argument);
}

TEST_CASE("constitutive operators 3D") {
  const ConstitutiveOperators ops = constitutive_operators(1.0, 3);
  Eigen::VectorXd d(6);
  d << 2, 2, 2, 1, 1, 1;
  CHECK(ops.D.diagonal().isApprox(d));
  Eigen::VectorXd e(6);
  e << 1, 1, 1, 0, 0, 0;
  CHECK(ops.E.isApprox(e));
  // D positive definite for nu > 0
  const ConstitutiveOperators nu3 = constitutive_operators(0.37, 3);
  CHECK(nu3.D.diagonal().minCoeff() > 0);
}

TEST_CASE("normal operator tables and N^T E = n") {
  Eigen::VectorXd n(2);
  n << 1, 0;
  const Eigen::MatrixXd N = normal_operator(n);
  Eigen::MatrixXd NT_expected(2, 3);
  NT_expected << 1, 0, 0, 0, 0, 1;
  CHECK(N.transpose().isApprox(NT_expected));

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int nsd : {2, 3}) {
    const ConstitutiveOperators ops = constitutive_operators(1.0, nsd);
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::VectorXd v(nsd);
      for (int i = 0; i < nsd; ++i) v(i) = dist(rng);
      v.normalize();
      const Eigen::MatrixXd Nv = normal_operator(v);
      CHECK((Nv.transpose() * ops.E - v).cwiseAbs().maxCoeff() <= 1e-15);
      // N = sum_k F_k n_k entrywise
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(Nv.rows(), Nv.cols());
      for (int k = 0; k < nsd; ++k) sum += ops.F[k] * v(k);
      CHECK((sum - Nv).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }
  Eigen::VectorXd bad(2);
  bad << 0.6, 0.9;
  CHECK_THROWS_AS(normal_operator(bad), std::invalid_argument);
}

TEST_CASE("sum_k F_k n_k for the spec sample normal") {
  Eigen::VectorXd n(2);
  n << 0.6, 0.8;
  const ConstitutiveOperators ops = constitutive_operators(1.0, 2);
  const Eigen::MatrixXd N = normal_operator(n);
  const Eigen::MatrixXd N2 = ops.F[0] * 0.6 + ops.F[1] * 0.8;
  CHECK((N - N2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tangent operator") {
  Eigen::VectorXd n(2);
  n << 1, 0;
  const Eigen::MatrixXd T = tangent_operator(n);
  CHECK(T(0, 0) == 0.0);
  CHECK(T(0, 1) == 1.0);

  Eigen::VectorXd n2(2);
  n2 << 0.6, 0.8;
  CHECK(std::abs((tangent_operator(n2) * n2)(0)) <= 1e-15);

  Eigen::VectorXd n3(3);
  n3 << 0, 0, 1;
  const Eigen::MatrixXd T3 = tangent_operator(n3);
  CHECK(T3.row(0).isApprox(Eigen::RowVector3d(0, -1, 0)));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v(i) = dist(rng);
    v.normalize();
    CHECK((tangent_operator(v) * v).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("strain Voigt round trip") {
  Eigen::VectorXd ev(3);
  ev << 0, 0, 1;
  Eigen::MatrixXd t = strain_voigt_to_tensor(ev);
  CHECK(t(0, 1) == doctest::Approx(0.5));
  CHECK(t(1, 0) == doctest::Approx(0.5));
  CHECK(t(0, 0) == 0.0);

  ev << 1, 2, 0;
  t = strain_voigt_to_tensor(ev);
  CHECK(t.isApprox(Eigen::Vector2d(1, 2).asDiagonal().toDenseMatrix()));

  // grad_s of u = (x2, 0) has Voigt form (0, 0, 1)
  Eigen::Matrix2d g;
  g << 0, 1, 0, 0;  // du1/dx2 = 1
  const Eigen::Matrix2d gs = 0.5 * (g + g.transpose());
  const Eigen::VectorXd back = strain_tensor_to_voigt(gs);
  CHECK(back.isApprox(Eigen::Vector3d(0, 0, 1)));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-2, 2);
  for (int nsd : {2, 3}) {
    const int msd = nsd * (nsd + 1) / 2;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd v(msd);
      for (int i = 0; i < msd; ++i) v(i) = dist(rng);
      const Eigen::VectorXd rt = strain_tensor_to_voigt(strain_voigt_to_tensor(v));
      CHECK((rt - v).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  Eigen::VectorXd bad(4);
  bad.setZero();
  CHECK_THROWS_AS(strain_voigt_to_tensor(bad), std::invalid_argument);
}

TEST_CASE("discrete divergence identity E^T grad_s u = div u") {
  // random polynomial velocity fields, gradients evaluated symbolically by
  // monomial differentiation
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1, 1);
  const ConstitutiveOperators ops = constitutive_operators(1.0, 2);
  for (int trial = 0; trial < 12; ++trial) {
    // u_i = sum c_abi x^a y^b, a+b <= 3
    double c[4][4][2];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 2; ++i) c[a][b][i] = a + b <= 3 ? dist(rng) : 0.0;
    for (int pt = 0; pt < 10; ++pt) {
      const double x = dist(rng), y = dist(rng);
      Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int i = 0; i < 2; ++i) {
            if (a > 0) g(i, 0) += c[a][b][i] * a * std::pow(x, a - 1) * std::pow(y, b);
            if (b > 0) g(i, 1) += c[a][b][i] * b * std::pow(x, a) * std::pow(y, b - 1);
          }
      const Eigen::Vector3d ev(g(0, 0), g(1, 1), g(0, 1) + g(1, 0));
      const double div = g(0, 0) + g(1, 1);
      CHECK(ops.E.dot(ev) == doctest::Approx(div).epsilon(1e-13));
    }
  }
}
