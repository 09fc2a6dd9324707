// Analytical benchmark flows: Wang (Stokes), Kovasznay (Oseen and
// Navier-Stokes) and channel Poiseuille flow.

#ifndef HDGFLOW_CASES_HPP
#define HDGFLOW_CASES_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "hdgflow/flow_solvers.hpp"
#include "hdgflow/mesh.hpp"
#include "hdgflow/problem.hpp"

namespace hdgflow {

struct CaseParams {
  // Wang
  double a = 1.0, b = 1.0, lambda = 10.0, nu_wang = 1.0;
  // Kovasznay (nu = 1/(2 Re) keeps the source identically zero)
  double Re = 100.0;
  // Poiseuille
  double V = 1.0, nu_poiseuille = 1.0;
};

struct AnalyticCase {
  std::string name;
  double nu = 1.0;
  Rect domain;
  VectorField velocity;
  std::function<double(const Eigen::Vector2d&)> pressure;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> velocity_gradient;  ///< (i,j) = du_i/dx_j
  VectorField source;  ///< identically zero for all shipped cases

  /// Scaled strain-rate mixed variable -Dhalf grad_s u in Voigt components.
  Eigen::Vector3d exact_mixed(const Eigen::Vector2d& x) const;

  /// Boundary traction for the given regime at outward normal n.
  Eigen::Vector2d traction(const Eigen::Vector2d& x, const Eigen::Vector2d& n,
                           Regime regime) const;

  /// Default boundary layout: Wang/Kovasznay put Neumann on the bottom;
  /// Poiseuille puts outflow on the right end. `all_dirichlet` overrides.
  std::vector<std::pair<FaceTag, BoundaryTagger>> default_taggers(bool all_dirichlet = false) const;

  StabilizationConfig default_stab(Regime regime) const;

  /// ProblemData with source/Dirichlet/traction closures for the regime.
  ProblemData problem_data(Regime regime) const;

  /// Fully configured problem on the mesh (stabilization defaults included).
  FlowProblem make_problem(const Mesh& mesh, Regime regime) const;
};

AnalyticCase analytic_case(const std::string& name, const CaseParams& params = {});

}  // namespace hdgflow

#endif
