#include "hdgflow/cli_driver.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hdgflow/cases.hpp"
#include "hdgflow/plot_svg.hpp"
#include "hdgflow/postprocess.hpp"
#include "hdgflow/verification.hpp"
#include "hdgflow/vtk_writer.hpp"

namespace hdgflow {

namespace {

struct CommonOpts {
  std::string case_name = "wang";
  std::string regime = "stokes";
  std::string elem = "tri";
  int nx = 8, ny = 8;
  int k = 1;
  double kappa = -1.0, beta = -1.0, ell = 0.0;
  std::string tau_a_mode = "2norm";
  std::string outflow = "outflow";
  std::string mesh_file;
  std::string out_dir;
  int threads = 1;
  int newton_max = 20;
  double newton_tol = 1e-10;
  bool strict_admissibility = false;
};

Regime parse_regime(const std::string& s) {
  if (s == "stokes") return Regime::stokes;
  if (s == "oseen") return Regime::oseen;
  if (s == "navier_stokes" || s == "ns") return Regime::navier_stokes;
  throw CLI::ValidationError("regime", "unknown regime " + s);
}

ElemType parse_elem(const std::string& s) {
  if (s == "tri") return ElemType::simplex;
  if (s == "quad") return ElemType::quad;
  throw CLI::ValidationError("elem", "unknown element type " + s);
}

OutflowMode parse_outflow(const std::string& s) {
  if (s == "outflow") return OutflowMode::outflow;
  if (s == "neumann" || s == "homogeneous_neumann") return OutflowMode::homogeneous_neumann;
  if (s == "traction_free") return OutflowMode::traction_free;
  throw CLI::ValidationError("outflow", "unknown outflow mode " + s);
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mesh = true) {
  cmd->add_option("--case", o.case_name, "analytic case: wang, kovasznay, poiseuille");
  cmd->add_option("--regime", o.regime, "stokes, oseen, navier_stokes");
  cmd->add_option("--elem", o.elem, "element type: tri or quad");
  cmd->add_option("-k,--degree", o.k, "polynomial degree")->check(CLI::Range(1, 8));
  cmd->add_option("--kappa", o.kappa, "diffusive stabilization scaling (case default if unset)");
  cmd->add_option("--beta", o.beta, "convective stabilization scaling (case default if unset)");
  cmd->add_option("--ell", o.ell, "characteristic length (0: bounding-box side)");
  cmd->add_option("--tau-a-mode", o.tau_a_mode, "2norm, infnorm or upwind");
  cmd->add_option("--outflow", o.outflow, "outflow, neumann or traction_free");
  cmd->add_option("--out", o.out_dir, "output directory (default $HDGFLOW_OUT or .)");
  cmd->add_option("--threads", o.threads, "assembly/recovery threads")->check(CLI::Range(1, 64));
  cmd->add_option("--newton-max", o.newton_max, "Newton iteration cap");
  cmd->add_option("--newton-tol", o.newton_tol, "Newton increment/residual tolerance");
  cmd->add_flag("--strict-admissibility", o.strict_admissibility,
                "refuse to solve when the admissibility margin is negative");
  if (with_mesh) {
    cmd->add_option("--nx", o.nx, "cells in x")->check(CLI::PositiveNumber);
    cmd->add_option("--ny", o.ny, "cells in y")->check(CLI::PositiveNumber);
    cmd->add_option("--mesh", o.mesh_file, "mesh file (overrides --nx/--ny/--elem)");
  }
  cmd->set_config("--config", "", "config file with key = value lines");
}

std::string output_dir(const CommonOpts& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("HDGFLOW_OUT")) return env;
  return ".";
}

Mesh build_mesh(const CommonOpts& o, const AnalyticCase& c) {
  if (!o.mesh_file.empty()) return load_mesh_text(o.mesh_file);
  Mesh mesh = structured_mesh(c.domain, o.nx, o.ny, parse_elem(o.elem), o.k);
  classify_boundary(mesh, c.default_taggers());
  return mesh;
}

FlowProblem configure_problem(const CommonOpts& o, const AnalyticCase& c, const Mesh& mesh) {
  FlowProblem p = c.make_problem(mesh, parse_regime(o.regime));
  if (o.kappa > 0) p.stab.kappa = o.kappa;
  if (o.beta >= 0) p.stab.beta = o.beta;
  p.stab.ell = o.ell;
  if (o.tau_a_mode == "infnorm")
    p.stab.norm_mode = TauConvNorm::global_inf_norm;
  else if (o.tau_a_mode == "upwind")
    p.stab.norm_mode = TauConvNorm::per_face_upwind;
  p.outflow_mode = parse_outflow(o.outflow);
  p.strict_admissibility = o.strict_admissibility;
  p.threads = o.threads;
  return p;
}

NewtonConfig newton_config(const CommonOpts& o) {
  NewtonConfig cfg;
  cfg.max_iters = o.newton_max;
  cfg.increment_tol = o.newton_tol;
  cfg.residual_tol = o.newton_tol;
  return cfg;
}

int cmd_run(const CommonOpts& o, bool vtk, bool csv, bool dump_matrix) {
  const AnalyticCase c = analytic_case(o.case_name);
  const Mesh mesh = build_mesh(o, c);
  FlowProblem problem = configure_problem(o, c, mesh);

  const auto t0 = std::chrono::steady_clock::now();
  const SolveArtifacts art = solve_flow(problem, newton_config(o));
  const PostprocessedField star = postprocess_velocity(art.solution, mesh, problem.data);
  const auto t1 = std::chrono::steady_clock::now();
  const ErrorReport err = compute_errors(art.solution, &star, c, mesh, mesh.pure_dirichlet());
  const double seconds = std::chrono::duration<double>(t1 - t0).count();

  const std::string dir = output_dir(o);
  std::filesystem::create_directories(dir);
  if (vtk) write_vtk_fields(dir + "/fields.vtk", mesh, art.solution, &star);
  if (dump_matrix) {
    // re-assemble to capture the system (cheap at desk scale)
    AssemblyTables tables = make_assembly_tables(mesh.elem_type, mesh.degree, problem.data.nu);
    LocalAssemblyContext ctx;
    ctx.mesh = &mesh;
    ctx.tables = &tables;
    ctx.data = &problem.data;
    const StabilizationValues tau =
        stabilization(problem.stab, problem.data.nu,
                      problem.regime == Regime::oseen ? problem.convection : VectorField(), mesh);
    ctx.tau = {tau.tau_d, tau.tau_a, false, 0.0};
    if (problem.regime == Regime::oseen) {
      ctx.conv.kind = ConvectionField::Kind::analytic;
      ctx.conv.analytic = problem.convection;
    }
    std::vector<CondensedElement> elems;
    for (int e = 0; e < mesh.n_elements(); ++e)
      elems.push_back(condense(assemble_local_blocks(ctx, e)));
    const GlobalSystem sys = assemble_global(elems, mesh, problem.outflow_mode, false);
    dump_matrix_coordinate(sys, dir + "/matrix.txt");
  }
  if (csv) {
    std::ofstream out(dir + "/summary.csv");
    out.precision(12);
    out << "case,regime,elem,k,nx,ny,err_u,err_ustar,err_L,err_p,linf_u,tau_d,tau_a,"
           "admissibility_margin,newton_iterations,newton_converged,solve_residual,seconds\n";
    out << o.case_name << "," << o.regime << "," << o.elem << "," << o.k << "," << o.nx << ","
        << o.ny << "," << err.u << "," << err.ustar << "," << err.L << "," << err.p << ","
        << err.linf_u << "," << art.solution.tau_d << "," << art.solution.tau_a << ","
        << art.solution.admissibility_margin << "," << art.solution.newton_iterations << ","
        << (art.solution.newton_converged ? 1 : 0) << "," << art.solution.solve_residual << ","
        << seconds << "\n";
  }
  std::cout << "case=" << o.case_name << " regime=" << o.regime << " k=" << o.k
            << " err_u=" << err.u << " err_ustar=" << err.ustar << " err_L=" << err.L
            << " err_p=" << err.p << " linf_u=" << err.linf_u << "\n";
  if (problem.regime == Regime::navier_stokes)
    std::cout << "newton iterations=" << art.solution.newton_iterations
              << " converged=" << art.solution.newton_converged << "\n";
  return art.solution.newton_converged ? 0 : 2;
}

int cmd_converge(const CommonOpts& o, const std::string& degrees_arg, int n_meshes, bool svg) {
  if (n_meshes < 3) {
    std::cerr << "converge: at least 3 meshes required\n";
    return 1;
  }
  std::vector<int> degrees;
  {
    std::stringstream ss(degrees_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) degrees.push_back(std::stoi(tok));
  }
  const AnalyticCase c = analytic_case(o.case_name);
  NewtonConfig newton = newton_config(o);
  const ConvergenceTable table = convergence_study(c, parse_regime(o.regime), degrees, n_meshes,
                                                   parse_elem(o.elem), o.threads, newton);
  const std::string dir = output_dir(o);
  std::filesystem::create_directories(dir);
  write_convergence_csv(table, dir + "/convergence.csv");

  std::vector<PlotSeries> series;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::vector<double> slopes;
  for (size_t i = 0; i < table.series.size(); ++i) {
    const ConvergenceSeries& s = table.series[i];
    PlotSeries ps_u, ps_star;
    ps_u.label = "u, k=" + std::to_string(s.k);
    ps_u.color = colors[i % 5];
    ps_star.label = "u*, k=" + std::to_string(s.k);
    ps_star.color = colors[(i + 2) % 5];
    for (const ConvergenceRow& r : s.rows) {
      ps_u.x.push_back(r.h);
      ps_u.y.push_back(r.err.u);
      ps_star.x.push_back(r.h);
      ps_star.y.push_back(r.err.ustar);
    }
    series.push_back(ps_u);
    series.push_back(ps_star);
    slopes.push_back(s.k + 1.0);
    slopes.push_back(s.k + 2.0);
    std::cout << "k=" << s.k << " rate_u=" << s.rate_u << " rate_ustar=" << s.rate_ustar
              << " rate_L=" << s.rate_L << " rate_p=" << s.rate_p << "\n";
  }
  if (svg)
    write_loglog_svg(dir + "/convergence.svg", o.case_name + " / " + o.regime + " convergence",
                     "h", "relative L2 error", series, slopes);
  if (!table.complete) {
    std::cerr << "converge: a solve failed; partial table written\n";
    return 2;
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& param, const std::string& grid_arg,
              int mesh_level) {
  std::vector<double> grid;
  {
    std::stringstream ss(grid_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
  }
  const AnalyticCase c = analytic_case(o.case_name);
  const SweepParameter sp = param == "kappa" ? SweepParameter::kappa : SweepParameter::beta;
  const std::vector<SweepRow> rows = sensitivity_sweep(c, parse_regime(o.regime), sp, grid,
                                                       parse_elem(o.elem), mesh_level, o.k,
                                                       o.threads);
  const std::string dir = output_dir(o);
  std::filesystem::create_directories(dir);
  write_sweep_csv(rows, sp, dir + "/sweep.csv");
  for (const SweepRow& r : rows)
    std::cout << param << "=" << r.value
              << (r.failed ? " FAILED" : " err_u=" + std::to_string(r.err.u)) << "\n";
  return 0;
}

int cmd_check(const CommonOpts& o, double force_tau) {
  const AnalyticCase c = analytic_case(o.case_name);
  const Mesh mesh = build_mesh(o, c);
  FlowProblem problem = configure_problem(o, c, mesh);
  if (force_tau >= 0.0) {
    // direct tau override for diagnostics: tau_d = value, tau_a = 0
    problem.stab.kappa = force_tau > 0 ? force_tau * problem.stab.ell / problem.data.nu : 1e-300;
    problem.stab.beta = 0.0;
  }

  const Regime regime = parse_regime(o.regime);
  bool pass = true;

  const AssemblyTables tables = make_assembly_tables(mesh.elem_type, mesh.degree, problem.data.nu);
  const StabilizationValues tau =
      stabilization(problem.stab, problem.data.nu,
                    regime != Regime::stokes ? (problem.convection ? problem.convection : c.velocity)
                                             : VectorField(),
                    mesh);
  ConvectionField conv;
  if (regime != Regime::stokes) {
    conv.kind = ConvectionField::Kind::analytic;
    conv.analytic = c.velocity;
  }
  const AdmissibilityReport adm = admissibility_check(
      mesh, tables, {tau.tau_d, tau.tau_a, false, 0.0}, conv, problem.data, 1e-10);
  std::cout << "admissibility margin: " << adm.margin << (adm.pass ? " (pass)" : " (FAIL)")
            << "\n";
  if (!adm.pass) pass = false;

  try {
    problem.strict_admissibility = false;
    const SolveArtifacts art = solve_flow(problem, newton_config(o));
    std::cout << "max |H - G| / |G| per element: " << art.structure.max_HG_mismatch
              << (art.structure.max_HG_mismatch <= 1e-11 ? " (pass)" : " (FAIL)") << "\n";
    if (art.structure.max_HG_mismatch > 1e-11) pass = false;
    if (art.structure.symmetry_applicable) {
      std::cout << "global matrix asymmetry: " << art.structure.asymmetry
                << (art.structure.asymmetry <= 1e-12 ? " (pass)" : " (FAIL)") << "\n";
      if (art.structure.asymmetry > 1e-12) pass = false;
    } else {
      std::cout << "global matrix asymmetry: not applicable (" << o.regime << ")\n";
    }
    const Eigen::VectorXd compat =
        compatibility_residuals(mesh, tables, art.solution, problem.data);
    const double cmax = compat.cwiseAbs().maxCoeff();
    std::cout << "max per-element compatibility residual: " << cmax
              << (cmax <= 1e-10 ? " (pass)" : " (FAIL)") << "\n";
    if (cmax > 1e-10) pass = false;
  } catch (const std::exception& ex) {
    std::cerr << "check: solver failure: " << ex.what() << "\n";
    return 2;
  }
  return pass ? 0 : 3;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"HDG solver for incompressible Stokes / Oseen / Navier-Stokes flow"};
  app.require_subcommand(1);

  CommonOpts o;
  bool vtk = true, csv = true, svg = true, dump_matrix = false;
  std::string degrees = "1,2,3";
  int n_meshes = 4;
  std::string sweep_param = "kappa";
  std::string sweep_grid = "0.01,0.1,1,3,10,100,1000";
  int mesh_level = 2;
  double force_tau = -1.0;

  CLI::App* run = app.add_subcommand("run", "single solve with VTK/CSV artifacts");
  add_common(run, o);
  run->add_flag("--vtk,!--no-vtk", vtk, "write fields.vtk");
  run->add_flag("--csv,!--no-csv", csv, "write summary.csv");
  run->add_flag("--dump-matrix", dump_matrix, "write the global matrix in coordinate format");

  CLI::App* conv = app.add_subcommand("converge", "mesh convergence study");
  add_common(conv, o, false);
  conv->add_option("--degrees", degrees, "comma-separated degrees, e.g. 1,2,3");
  conv->add_option("--meshes", n_meshes, "number of uniform refinements (>= 3)");
  conv->add_flag("--svg,!--no-svg", svg, "write the log-log plot");

  CLI::App* sweep = app.add_subcommand("sweep", "stabilization sensitivity sweep");
  add_common(sweep, o, false);
  sweep->add_option("--param", sweep_param, "kappa or beta")
      ->check(CLI::IsMember({"kappa", "beta"}));
  sweep->add_option("--grid", sweep_grid, "comma-separated parameter values");
  sweep->add_option("--mesh-level", mesh_level, "refinement level of the sweep mesh");

  CLI::App* check = app.add_subcommand("check", "structural checks (H=G, symmetry, residuals)");
  add_common(check, o);
  check->add_option("--force-tau", force_tau, "override tau_d with a fixed value, tau_a = 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(o, vtk, csv, dump_matrix);
    if (conv->parsed()) return cmd_converge(o, degrees, n_meshes, svg);
    if (sweep->parsed()) return cmd_sweep(o, sweep_param, sweep_grid, mesh_level);
    if (check->parsed()) return cmd_check(o, force_tau);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace hdgflow
