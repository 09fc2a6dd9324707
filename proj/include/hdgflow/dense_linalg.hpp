// Dense factorization kernels shared by local assembly, postprocessing and
// the structural checks. Thin layer over Eigen's pivoted LU.

#ifndef HDGFLOW_DENSE_LINALG_HPP
#define HDGFLOW_DENSE_LINALG_HPP

#include <Eigen/Dense>

namespace hdgflow {

struct LuSolveReport {
  double relative_residual = 0.0;  ///< ||AX - B|| / ||B|| (Frobenius)
  double pivot_growth = 0.0;       ///< max|U| / max|A|
};

/// Solve AX = B with partial pivoting. Throws std::runtime_error on an exactly
/// singular pivot. The local saddle systems have zero diagonal entries, so
/// pivoting is mandatory here.
Eigen::MatrixXd lu_factor_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                LuSolveReport* report = nullptr);

/// Numerical rank at the given relative tolerance via fully pivoted LU.
int rank_estimate(const Eigen::MatrixXd& A, double tol);

}  // namespace hdgflow

#endif
