// Drivers for Stokes, Oseen and Navier-Stokes solves: stabilization values,
// the admissibility gate, the assemble/condense/solve/recover pipeline and a
// Newton-Raphson loop with the convective stabilization frozen per iteration.

#ifndef HDGFLOW_FLOW_SOLVERS_HPP
#define HDGFLOW_FLOW_SOLVERS_HPP

#include "hdgflow/global_system.hpp"
#include "hdgflow/local_assembly.hpp"
#include "hdgflow/mesh.hpp"
#include "hdgflow/problem.hpp"

namespace hdgflow {

struct FlowProblem {
  const Mesh* mesh = nullptr;
  ProblemData data;
  VectorField convection;  ///< Oseen convection field (treated as solenoidal)
  Regime regime = Regime::stokes;
  StabilizationConfig stab;
  OutflowMode outflow_mode = OutflowMode::outflow;
  bool strict_admissibility = false;  ///< refuse to solve on a failed admissibility check
  double admissibility_gamma = 1e-10;
  int threads = 1;
};

struct StabilizationValues {
  double tau_d = 0.0;
  double tau_a = 0.0;
  double ell = 0.0;  ///< characteristic length actually used
};

/// tau_d = kappa nu / ell and tau_a = beta max over mesh nodes of |a| in the
/// configured norm (zero without convection). ell = 0 selects the largest
/// bounding-box side.
StabilizationValues stabilization(const StabilizationConfig& cfg, double nu,
                                  const VectorField& convection, const Mesh& mesh);

struct AdmissibilityReport {
  double margin = 0.0;  ///< min over face quadrature points of tau - a.n
  int worst_element = -1;
  int worst_face = -1;
  bool pass = true;
};

AdmissibilityReport admissibility_check(const Mesh& mesh, const AssemblyTables& tables,
                                        const TauPolicy& tau, const ConvectionField& conv,
                                        const ProblemData& data, double gamma);

struct SolveArtifacts {
  Solution solution;
  StructureReport structure;
  AdmissibilityReport admissibility;
};

/// Stokes or Oseen solve (Oseen requires `convection`).
SolveArtifacts solve_linear_flow(const FlowProblem& problem);

/// Newton-Raphson Navier-Stokes solve; the iteration trace lands in the
/// Solution. A non-converged run returns the best iterate with
/// newton_converged = false.
SolveArtifacts solve_navier_stokes(const FlowProblem& problem, const NewtonConfig& cfg);

/// Dispatch on problem.regime.
SolveArtifacts solve_flow(const FlowProblem& problem, const NewtonConfig& cfg = {});

/// Per-element divergence compatibility residual
/// <uhat.n> over non-Dirichlet faces + <u_D.n> over Dirichlet faces.
Eigen::VectorXd compatibility_residuals(const Mesh& mesh, const AssemblyTables& tables,
                                        const Solution& sol, const ProblemData& data);

/// Max interior-face transmission residual of the recovered fields,
/// stress trace + pressure + tau (u - uhat) summed over both sides.
double transmission_residual(const Mesh& mesh, const AssemblyTables& tables, const Solution& sol,
                             double tau);

}  // namespace hdgflow

#endif
