#include "hdgflow/voigt.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgflow {

VoigtDims voigt_dims(int nsd) {
  if (nsd != 2 && nsd != 3)
    throw std::invalid_argument("voigt_dims: nsd must be 2 or 3");
  return {nsd, nsd * (nsd + 1) / 2, nsd * (nsd - 1) / 2};
}

ConstitutiveOperators constitutive_operators(double nu, int nsd) {
  if (!(nu > 0.0))
    throw std::invalid_argument("constitutive_operators: nu must be positive");
  const VoigtDims dims = voigt_dims(nsd);
  ConstitutiveOperators ops;
  ops.E = Eigen::VectorXd::Zero(dims.msd);
  ops.E.head(nsd).setOnes();
  Eigen::VectorXd d(dims.msd);
  d.head(nsd).setConstant(2.0 * nu);
  d.tail(dims.msd - nsd).setConstant(nu);
  ops.D = d.asDiagonal();
  ops.Dhalf = d.cwiseSqrt().asDiagonal();
  // F_k tables: entry (m, i) = 1 iff Voigt slot m holds du_i/dx_k.
  ops.F.assign(nsd, Eigen::MatrixXd::Zero(dims.msd, nsd));
  if (nsd == 2) {
    ops.F[0](0, 0) = 1.0;
    ops.F[0](2, 1) = 1.0;
    ops.F[1](1, 1) = 1.0;
    ops.F[1](2, 0) = 1.0;
  } else {
    ops.F[0](0, 0) = 1.0;
    ops.F[0](3, 1) = 1.0;
    ops.F[0](4, 2) = 1.0;
    ops.F[1](1, 1) = 1.0;
    ops.F[1](3, 0) = 1.0;
    ops.F[1](5, 2) = 1.0;
    ops.F[2](2, 2) = 1.0;
    ops.F[2](4, 0) = 1.0;
    ops.F[2](5, 1) = 1.0;
  }
  return ops;
}

namespace {
void require_unit_normal(const Eigen::VectorXd& n) {
  if (n.size() != 2 && n.size() != 3)
    throw std::invalid_argument("normal/tangent operator: n must be 2D or 3D");
  if (std::abs(n.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("normal/tangent operator: n must be a unit vector");
}
}  // namespace

Eigen::MatrixXd normal_operator(const Eigen::VectorXd& n) {
  require_unit_normal(n);
  const int nsd = static_cast<int>(n.size());
  const VoigtDims dims = voigt_dims(nsd);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(dims.msd, nsd);
  if (nsd == 2) {
    N(0, 0) = n(0);
    N(1, 1) = n(1);
    N(2, 0) = n(1);
    N(2, 1) = n(0);
  } else {
    N(0, 0) = n(0);
    N(1, 1) = n(1);
    N(2, 2) = n(2);
    N(3, 0) = n(1);
    N(3, 1) = n(0);
    N(4, 0) = n(2);
    N(4, 2) = n(0);
    N(5, 1) = n(2);
    N(5, 2) = n(1);
  }
  return N;
}

Eigen::MatrixXd tangent_operator(const Eigen::VectorXd& n) {
  require_unit_normal(n);
  const int nsd = static_cast<int>(n.size());
  const VoigtDims dims = voigt_dims(nsd);
  Eigen::MatrixXd T(dims.nrr, nsd);
  if (nsd == 2) {
    T(0, 0) = -n(1);
    T(0, 1) = n(0);
  } else {
    T << 0.0, -n(2), n(1),
        n(2), 0.0, -n(0),
        -n(1), n(0), 0.0;
  }
  return T;
}

Eigen::MatrixXd strain_voigt_to_tensor(const Eigen::VectorXd& e_v) {
  int nsd = 0;
  if (e_v.size() == 3)
    nsd = 2;
  else if (e_v.size() == 6)
    nsd = 3;
  else
    throw std::invalid_argument("strain_voigt_to_tensor: length must be 3 or 6");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nsd, nsd);
  for (int i = 0; i < nsd; ++i) t(i, i) = e_v(i);
  if (nsd == 2) {
    t(0, 1) = t(1, 0) = 0.5 * e_v(2);
  } else {
    t(0, 1) = t(1, 0) = 0.5 * e_v(3);
    t(0, 2) = t(2, 0) = 0.5 * e_v(4);
    t(1, 2) = t(2, 1) = 0.5 * e_v(5);
  }
  return t;
}

Eigen::VectorXd strain_tensor_to_voigt(const Eigen::MatrixXd& t) {
  const int nsd = static_cast<int>(t.rows());
  if (t.cols() != nsd || (nsd != 2 && nsd != 3))
    throw std::invalid_argument("strain_tensor_to_voigt: tensor must be 2x2 or 3x3");
  if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + t.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("strain_tensor_to_voigt: tensor must be symmetric");
  const VoigtDims dims = voigt_dims(nsd);
  Eigen::VectorXd e(dims.msd);
  for (int i = 0; i < nsd; ++i) e(i) = t(i, i);
  if (nsd == 2) {
    e(2) = 2.0 * t(0, 1);
  } else {
    e(3) = 2.0 * t(0, 1);
    e(4) = 2.0 * t(0, 2);
    e(5) = 2.0 * t(1, 2);
  }
  return e;
}

}  // namespace hdgflow
