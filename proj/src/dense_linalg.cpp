#include "hdgflow/dense_linalg.hpp"

#include <stdexcept>

namespace hdgflow {

Eigen::MatrixXd lu_factor_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                LuSolveReport* report) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("lu_factor_solve: A must be square");
  if (A.rows() != B.rows())
    throw std::invalid_argument("lu_factor_solve: dimension mismatch");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::MatrixXd& packed = lu.matrixLU();
  const double max_a = A.cwiseAbs().maxCoeff();
  double max_u = 0.0;
  for (Eigen::Index j = 0; j < packed.cols(); ++j)
    max_u = std::max(max_u, packed.col(j).head(j + 1).cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (packed(i, i) == 0.0)
      throw std::runtime_error("lu_factor_solve: exactly singular matrix");
  }
  Eigen::MatrixXd X = lu.solve(B);
  if (report) {
    const double bnorm = B.norm();
    report->relative_residual = bnorm > 0.0 ? (A * X - B).norm() / bnorm : (A * X).norm();
    report->pivot_growth = max_a > 0.0 ? max_u / max_a : 0.0;
  }
  return X;
}

int rank_estimate(const Eigen::MatrixXd& A, double tol) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

}  // namespace hdgflow
