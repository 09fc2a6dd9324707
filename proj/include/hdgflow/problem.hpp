// Problem data shared by the assembly and solver layers.

#ifndef HDGFLOW_PROBLEM_HPP
#define HDGFLOW_PROBLEM_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace hdgflow {

using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

enum class Regime { stokes, oseen, navier_stokes };
enum class OutflowMode { outflow, homogeneous_neumann, traction_free };
enum class TauConvNorm { global_two_norm, global_inf_norm, per_face_upwind };

/// Field data of a flow problem (boundary layout lives on the mesh tags).
struct ProblemData {
  double nu = 1.0;
  VectorField source;     ///< s(x); null means zero
  VectorField dirichlet;  ///< u_D(x) on Dirichlet faces
  VectorField traction;   ///< t(x) on Neumann faces; null means zero
};

/// Convection state for the momentum equation.
struct ConvectionField {
  enum class Kind { none, analytic, ns_iterate };
  Kind kind = Kind::none;
  VectorField analytic;  ///< Oseen convection a(x)

  // Navier-Stokes iterate: element velocities (2*nen each, node-major,
  // component-minor) and the hybrid trace per face (2*nfn, canonical order).
  const std::vector<Eigen::VectorXd>* u_elem = nullptr;
  const std::vector<Eigen::VectorXd>* u_hat = nullptr;
};

/// Per-run stabilization values; tau on a face is tau_d + tau_a, or the
/// upwind variant beta*max(a.n, 0) for the convective part.
struct TauPolicy {
  double tau_d = 0.0;
  double tau_a = 0.0;
  bool upwind = false;
  double upwind_beta = 0.0;
};

struct StabilizationConfig {
  double kappa = 3.0;
  double beta = 0.0;
  double ell = 0.0;  ///< characteristic length; 0 selects the bounding-box default
  TauConvNorm norm_mode = TauConvNorm::global_two_norm;
};

struct NewtonConfig {
  int max_iters = 20;
  double increment_tol = 1e-10;  ///< relative hybrid-increment tolerance
  double residual_tol = 1e-10;   ///< relative nonlinear residual tolerance
  bool stokes_initial_guess = true;
};

}  // namespace hdgflow

#endif
