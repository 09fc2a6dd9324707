// Element-by-element superconvergent velocity reconstruction in the
// degree-(k+1) space, constrained by the cell mean and the cell-mean curl.

#ifndef HDGFLOW_POSTPROCESS_HPP
#define HDGFLOW_POSTPROCESS_HPP

#include <Eigen/Dense>
#include <vector>

#include "hdgflow/global_system.hpp"
#include "hdgflow/mesh.hpp"
#include "hdgflow/problem.hpp"

namespace hdgflow {

struct PostprocessedField {
  int degree = 0;  ///< k+1
  std::vector<Eigen::VectorXd> u_star;  ///< per element, 2*nen_star nodal values
  double max_mean_residual = 0.0;  ///< constraint residuals after the solve
  double max_curl_residual = 0.0;
};

/// Solves, per element, the Dhalf-weighted stiffness problem driven by the
/// mixed variable, with mean and curl constraints imposed through Lagrange
/// multipliers. The curl right-hand side integrates the tangential trace of
/// u_D / uhat along the element boundary.
PostprocessedField postprocess_velocity(const Solution& sol, const Mesh& mesh,
                                        const ProblemData& data);

}  // namespace hdgflow

#endif
