// Voigt-notation operators for symmetric second-order tensors in 2D and 3D.
//
// Component ordering: (11, 22, 12) in 2D and (11, 22, 33, 12, 13, 23) in 3D.
// Off-diagonal Voigt entries carry the engineering convention
// e_ij = du_i/dx_j + du_j/dx_i (no 1/2 factor).

#ifndef HDGFLOW_VOIGT_HPP
#define HDGFLOW_VOIGT_HPP

#include <Eigen/Dense>
#include <vector>

namespace hdgflow {

/// Dimension bookkeeping for Voigt storage.
struct VoigtDims {
  int nsd;  ///< spatial dimension (2 or 3)
  int msd;  ///< number of independent symmetric-tensor components, nsd(nsd+1)/2
  int nrr;  ///< number of rigid rotations, nsd(nsd-1)/2
};

/// Constitutive operators for the viscous Stokes law in Voigt form.
/// sigma_v = D * grad_s(u) - E * p, with D = Dhalf * Dhalf.
struct ConstitutiveOperators {
  Eigen::VectorXd E;               ///< trace extractor, size msd
  Eigen::MatrixXd D;               ///< diagonal viscosity matrix, msd x msd
  Eigen::MatrixXd Dhalf;           ///< elementwise square root of D
  std::vector<Eigen::MatrixXd> F;  ///< nsd matrices of size msd x nsd; grad_s = sum_k F_k d/dx_k
};

VoigtDims voigt_dims(int nsd);

ConstitutiveOperators constitutive_operators(double nu, int nsd);

/// Normal operator N (msd x nsd) with N^T sigma_v = sigma n. Requires |n| = 1.
Eigen::MatrixXd normal_operator(const Eigen::VectorXd& n);

/// Tangent operator T (nrr x nsd); in 2D T u = u . t with t the ccw tangent.
Eigen::MatrixXd tangent_operator(const Eigen::VectorXd& n);

/// Recover the symmetric tensor from its Voigt vector (off-diagonals halved).
Eigen::MatrixXd strain_voigt_to_tensor(const Eigen::VectorXd& e_v);

/// Inverse of strain_voigt_to_tensor; requires a symmetric tensor.
Eigen::VectorXd strain_tensor_to_voigt(const Eigen::MatrixXd& t);

}  // namespace hdgflow

#endif
