// Error integrators, convergence studies, stabilization sweeps and the
// finite-difference consistency oracle for the analytic cases.

#ifndef HDGFLOW_VERIFICATION_HPP
#define HDGFLOW_VERIFICATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "hdgflow/cases.hpp"
#include "hdgflow/flow_solvers.hpp"
#include "hdgflow/postprocess.hpp"

namespace hdgflow {

struct ErrorReport {
  double u = 0.0;      ///< relative L2
  double ustar = 0.0;  ///< relative L2 (0 when no postprocess supplied)
  double L = 0.0;      ///< relative L2, Voigt components
  double p = 0.0;      ///< relative L2, mean-adjusted under a pure-Dirichlet gauge
  double linf_u = 0.0;
  double pressure_shift = 0.0;  ///< subtracted constant when mean-adjusted
};

/// Element-quadrature errors at exactness 2(k+1)+2; Linf from a per-element
/// lattice of (k+3)^2 sample points. Relative norms fall back to absolute
/// when the exact field vanishes.
ErrorReport compute_errors(const Solution& sol, const PostprocessedField* star,
                           const AnalyticCase& exact, const Mesh& mesh,
                           bool mean_adjust_pressure = false);

struct ConvergenceRow {
  int k = 0;
  int level = 0;
  double h = 0.0;
  int n_dof = 0;
  ErrorReport err;
  int newton_iterations = 0;
};

struct ConvergenceSeries {
  int k = 0;
  std::vector<ConvergenceRow> rows;
  double rate_u = 0.0, rate_ustar = 0.0, rate_L = 0.0, rate_p = 0.0;
};

struct ConvergenceTable {
  std::string case_name;
  Regime regime = Regime::stokes;
  std::vector<ConvergenceSeries> series;
  bool complete = true;  ///< false when a solve failed and the series is partial
};

/// Least-squares slope of log(err) vs log(h) over the finest `npts` points.
double fit_rate(const std::vector<double>& h, const std::vector<double>& err, int npts = 3);

/// Uniform refinement study: mesh levels double nx, ny starting from
/// 2 (triangles) or 4 (quadrilaterals).
ConvergenceTable convergence_study(const AnalyticCase& c, Regime regime,
                                   const std::vector<int>& degrees, int n_meshes,
                                   ElemType elem_type, int threads = 1,
                                   const NewtonConfig& newton = {});

enum class SweepParameter { kappa, beta };

struct SweepRow {
  double value = 0.0;
  bool failed = false;
  ErrorReport err;
};

std::vector<SweepRow> sensitivity_sweep(const AnalyticCase& c, Regime regime,
                                        SweepParameter parameter,
                                        const std::vector<double>& grid, ElemType elem_type,
                                        int mesh_level, int k, int threads = 1);

struct CaseConsistency {
  double max_momentum_residual = 0.0;  ///< 6th-order finite differences, 50x50 grid
  double max_divergence = 0.0;
  double boundary_flux = 0.0;  ///< compatibility integral over the whole boundary
};

/// Independent oracle: plugs only the u/p closures (never the hand-coded
/// gradients) into the momentum and mass equations via finite differences.
CaseConsistency check_case_consistency(const AnalyticCase& c, bool with_convection);

/// Mesh level -> nx (2^level scaling from the base resolution).
int mesh_resolution(ElemType elem_type, int level);
double mesh_h(const AnalyticCase& c, ElemType elem_type, int level);
Mesh case_mesh(const AnalyticCase& c, ElemType elem_type, int level, int k,
               bool all_dirichlet = false);

// CSV writers for the two artifact schemas.
void write_convergence_csv(const ConvergenceTable& table, const std::string& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, SweepParameter parameter,
                     const std::string& path);

}  // namespace hdgflow

#endif
