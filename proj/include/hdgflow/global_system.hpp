// Condensed global saddle-point system over the hybrid velocity trace and the
// per-element boundary pressure integrals, its sparse direct solution, and
// the structural checks on the assembled blocks.

#ifndef HDGFLOW_GLOBAL_SYSTEM_HPP
#define HDGFLOW_GLOBAL_SYSTEM_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "hdgflow/local_assembly.hpp"
#include "hdgflow/mesh.hpp"
#include "hdgflow/problem.hpp"

namespace hdgflow {

/// Hybrid DOF layout: faces carrying trace unknowns get 2*(k+1) consecutive
/// DOFs (face-major, node-major, component-minor); element pressure
/// integrals follow as trailing unknowns.
struct DofMap {
  std::vector<int> face_offset;  ///< -1 for Dirichlet faces
  int nfn = 0;
  int n_hat = 0;
  int n_el = 0;
  int size() const { return n_hat + n_el; }
  int rho_index(int e) const { return n_hat + e; }
};

DofMap build_dof_map(const Mesh& mesh);

struct GlobalSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  DofMap dofs;
  bool pure_dirichlet = false;
  bool regularized = false;  ///< pressure-level row replacement applied

  // per hybrid node (n_hat/2): rotation into (normal, tangent) on outflow
  // faces; identity elsewhere
  std::vector<Eigen::Matrix2d> rotations;
  std::vector<char> constrained;  ///< per hybrid dof: tangential outflow constraint row
  bool any_rotation = false;

  // structural diagnostics computed on the pristine saddle matrix
  double asymmetry = 0.0;        ///< max |A - A^T| / max |A| before row edits
  double max_HG_mismatch = 0.0;  ///< max_e ||H_e - G_e||_inf / ||G_e||_inf
};

/// DOF layout, outflow rotations and constraint flags without matrix content.
GlobalSystem init_system_shape(const Mesh& mesh, OutflowMode outflow_mode);

/// Scatter-add the condensed elements. `expect_symmetric` requests the
/// asymmetry diagnostic (Stokes). Outflow rotation and constraints are only
/// applied when `outflow_mode == OutflowMode::outflow`.
GlobalSystem assemble_global(const std::vector<CondensedElement>& elems, const Mesh& mesh,
                             OutflowMode outflow_mode = OutflowMode::outflow,
                             bool expect_symmetric = false);

struct SaddleSolveResult {
  Eigen::VectorXd uhat;  ///< rotated frame where applicable
  Eigen::VectorXd rho;
  double residual = 0.0;
};

/// Sparse direct solve; throws std::runtime_error on factorization failure.
SaddleSolveResult solve_saddle(const GlobalSystem& system);

struct Solution {
  std::vector<Eigen::VectorXd> L;  ///< per element, msd*nen
  std::vector<Eigen::VectorXd> u;  ///< per element, 2*nen
  std::vector<Eigen::VectorXd> p;  ///< per element, nen
  std::vector<double> zeta;
  std::vector<Eigen::VectorXd> uhat;  ///< per face, Cartesian components; empty on Dirichlet faces
  Eigen::VectorXd rho;
  double solve_residual = 0.0;
  bool newton_converged = true;
  int newton_iterations = 0;
  std::vector<double> newton_residual_history;
  double admissibility_margin = 0.0;
  double tau_d = 0.0, tau_a = 0.0;
};

Solution recover_fields(const GlobalSystem& system, const SaddleSolveResult& sol,
                        const std::vector<CondensedElement>& elems, const Mesh& mesh);

struct StructureReport {
  double asymmetry = 0.0;
  double max_HG_mismatch = 0.0;
  bool pure_dirichlet = false;
  bool regularized = false;
  int n_hat = 0;
  int n_rho = 0;
  int nnz = 0;
  bool symmetry_applicable = false;
};

StructureReport structure_checks(const GlobalSystem& system, Regime regime);

/// Coordinate-format (row col value) dump of the assembled matrix.
void dump_matrix_coordinate(const GlobalSystem& system, const std::string& path);

}  // namespace hdgflow

#endif
