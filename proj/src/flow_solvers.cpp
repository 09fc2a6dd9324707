#include "hdgflow/flow_solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "hdgflow/voigt.hpp"

namespace hdgflow {

StabilizationValues stabilization(const StabilizationConfig& cfg, double nu,
                                  const VectorField& convection, const Mesh& mesh) {
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("stabilization: kappa must be positive");
  StabilizationValues out;
  out.ell = cfg.ell;
  if (out.ell <= 0.0) {
    const double dx = mesh.nodes.col(0).maxCoeff() - mesh.nodes.col(0).minCoeff();
    const double dy = mesh.nodes.col(1).maxCoeff() - mesh.nodes.col(1).minCoeff();
    out.ell = std::max(dx, dy);
  }
  out.tau_d = cfg.kappa * nu / out.ell;
  out.tau_a = 0.0;
  if (convection && cfg.beta > 0.0) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < mesh.nodes.rows(); ++i) {
      const Eigen::Vector2d a = convection(mesh.nodes.row(i).transpose());
      m = std::max(m, cfg.norm_mode == TauConvNorm::global_inf_norm ? a.cwiseAbs().maxCoeff()
                                                                    : a.norm());
    }
    out.tau_a = cfg.beta * m;
  }
  return out;
}

namespace {

double iterate_tau_a(const StabilizationConfig& cfg, const Mesh& mesh,
                     const std::vector<Eigen::VectorXd>& u_elem) {
  if (!(cfg.beta > 0.0)) return 0.0;
  double m = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Eigen::VectorXd& u = u_elem[e];
    for (Eigen::Index j = 0; 2 * j < u.size(); ++j) {
      const Eigen::Vector2d v = u.segment<2>(2 * j);
      m = std::max(m, cfg.norm_mode == TauConvNorm::global_inf_norm ? v.cwiseAbs().maxCoeff()
                                                                    : v.norm());
    }
  }
  return cfg.beta * m;
}

Eigen::Vector2d face_value(const Eigen::VectorXd& nodal, const Eigen::MatrixXd& face_N, int g,
                           const std::vector<int>& col) {
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < col.size(); ++i)
    v += face_N(g, static_cast<int>(i)) * nodal.segment<2>(2 * col[i]);
  return v;
}

}  // namespace

AdmissibilityReport admissibility_check(const Mesh& mesh, const AssemblyTables& t,
                                        const TauPolicy& tau, const ConvectionField& conv,
                                        const ProblemData& data, double gamma) {
  AdmissibilityReport rep;
  rep.margin = tau.tau_d + tau.tau_a;
  const int nfn = t.face.nen;
  if (conv.kind == ConvectionField::Kind::none) {
    rep.pass = rep.margin >= gamma;
    return rep;
  }
  const int nqf = static_cast<int>(t.face_quad.weights.size());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int f = 0; f < t.elem.nfaces; ++f) {
      const ElementFaceRef ref = mesh.elem_faces[e][f];
      const bool dirichlet = mesh.faces[ref.face].tag == FaceTag::dirichlet;
      const FaceQuadrature fg = element_face_quadrature(mesh, t, e, f);
      std::vector<int> col(nfn);
      for (int i = 0; i < nfn; ++i) col[i] = ref.reversed ? t.reversal[i] : i;
      for (int g = 0; g < nqf; ++g) {
        Eigen::Vector2d ahat;
        const Eigen::Vector2d xg = fg.x.row(g).transpose();
        if (conv.kind == ConvectionField::Kind::analytic)
          ahat = conv.analytic(xg);
        else if (dirichlet)
          ahat = data.dirichlet ? data.dirichlet(xg) : Eigen::Vector2d::Zero().eval();
        else
          ahat = face_value((*conv.u_hat)[ref.face], t.face_N, g, col);
        const double m = tau.tau_d + tau.tau_a - ahat.dot(fg.normal.row(g).transpose());
        if (m < rep.margin) {
          rep.margin = m;
          rep.worst_element = e;
          rep.worst_face = ref.face;
        }
      }
    }
  }
  rep.pass = rep.margin >= gamma;
  return rep;
}

namespace {

std::vector<CondensedElement> condense_all(const LocalAssemblyContext& ctx, int nel, int threads) {
  std::vector<CondensedElement> out(nel);
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int e = 0; e < nel; ++e) out[e] = condense(assemble_local_blocks(ctx, e));
    return out;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  std::vector<std::string> errors(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w]() {
      try {
        for (int e = next.fetch_add(1); e < nel; e = next.fetch_add(1))
          out[e] = condense(assemble_local_blocks(ctx, e));
      } catch (const std::exception& ex) {
        errors[w] = ex.what();
      }
    });
  for (std::thread& th : pool) th.join();
  for (const std::string& err : errors)
    if (!err.empty()) throw std::runtime_error(err);
  return out;
}

struct IterationState {
  std::vector<Eigen::VectorXd> u_elem;
  std::vector<Eigen::VectorXd> u_hat;  ///< per face, Cartesian canonical order; zero on Dirichlet
  Eigen::VectorXd raw;                 ///< stacked (uhat, rho) in the solver frame
};

IterationState to_state(const Solution& sol, const GlobalSystem& sys, const Mesh& mesh) {
  IterationState st;
  st.u_elem = sol.u;
  st.u_hat.assign(mesh.n_faces(), Eigen::VectorXd());
  const int nfn = sys.dofs.nfn;
  for (int f = 0; f < mesh.n_faces(); ++f)
    st.u_hat[f] = sol.uhat[f].size() ? sol.uhat[f] : Eigen::VectorXd::Zero(2 * nfn);
  st.raw.resize(sys.dofs.size());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const int off = sys.dofs.face_offset[f];
    if (off < 0) continue;
    Eigen::VectorXd v = st.u_hat[f];
    if (sys.any_rotation)
      for (int i = 0; i < nfn; ++i)
        v.segment<2>(2 * i) = sys.rotations[off / 2 + i] * v.segment<2>(2 * i);
    st.raw.segment(off, 2 * nfn) = v;
  }
  st.raw.tail(sys.dofs.n_el) = sol.rho;
  return st;
}

}  // namespace

SolveArtifacts solve_linear_flow(const FlowProblem& problem) {
  if (problem.regime == Regime::navier_stokes)
    throw std::invalid_argument("solve_linear_flow: use solve_navier_stokes");
  if (problem.regime == Regime::oseen && !problem.convection)
    throw std::invalid_argument("solve_linear_flow: Oseen requires a convection field");
  const Mesh& mesh = *problem.mesh;
  const AssemblyTables tables =
      make_assembly_tables(mesh.elem_type, mesh.degree, problem.data.nu);

  const StabilizationValues tau =
      stabilization(problem.stab, problem.data.nu,
                    problem.regime == Regime::oseen ? problem.convection : VectorField(), mesh);

  LocalAssemblyContext ctx;
  ctx.mesh = &mesh;
  ctx.tables = &tables;
  ctx.data = &problem.data;
  ctx.tau = {tau.tau_d, tau.tau_a, problem.stab.norm_mode == TauConvNorm::per_face_upwind,
             problem.stab.beta};
  ctx.outflow_as_neumann = problem.outflow_mode == OutflowMode::homogeneous_neumann;
  if (problem.regime == Regime::oseen) {
    ctx.conv.kind = ConvectionField::Kind::analytic;
    ctx.conv.analytic = problem.convection;
  }

  SolveArtifacts art;
  art.admissibility = admissibility_check(mesh, tables, ctx.tau, ctx.conv, problem.data,
                                          problem.admissibility_gamma);
  if (!art.admissibility.pass && problem.strict_admissibility)
    throw std::runtime_error("solve_linear_flow: admissibility condition violated (margin " +
                             std::to_string(art.admissibility.margin) + ")");

  const std::vector<CondensedElement> elems =
      condense_all(ctx, mesh.n_elements(), problem.threads);
  const GlobalSystem sys = assemble_global(elems, mesh, problem.outflow_mode,
                                           problem.regime == Regime::stokes);
  const SaddleSolveResult raw = solve_saddle(sys);
  art.solution = recover_fields(sys, raw, elems, mesh);
  art.solution.tau_d = tau.tau_d;
  art.solution.tau_a = tau.tau_a;
  art.solution.admissibility_margin = art.admissibility.margin;
  art.structure = structure_checks(sys, problem.regime);
  return art;
}

SolveArtifacts solve_navier_stokes(const FlowProblem& problem, const NewtonConfig& cfg) {
  if (problem.regime != Regime::navier_stokes)
    throw std::invalid_argument("solve_navier_stokes: regime mismatch");
  if (cfg.max_iters < 1 || cfg.increment_tol <= 0 || cfg.residual_tol <= 0)
    throw std::invalid_argument("solve_navier_stokes: invalid Newton configuration");
  const Mesh& mesh = *problem.mesh;
  const AssemblyTables tables =
      make_assembly_tables(mesh.elem_type, mesh.degree, problem.data.nu);
  const StabilizationValues tau0 =
      stabilization(problem.stab, problem.data.nu, VectorField(), mesh);

  // Initial guess: Stokes solve with the same data (or zero fields).
  const GlobalSystem shape = init_system_shape(mesh, problem.outflow_mode);
  IterationState prev;
  if (cfg.stokes_initial_guess) {
    FlowProblem stokes = problem;
    stokes.regime = Regime::stokes;
    SolveArtifacts init = solve_linear_flow(stokes);
    prev = to_state(init.solution, shape, mesh);
  } else {
    const ReferenceElement re = reference_element(mesh.elem_type, mesh.degree);
    Solution zero;
    zero.u.assign(mesh.n_elements(), Eigen::VectorXd::Zero(2 * re.nen));
    zero.uhat.assign(mesh.n_faces(), Eigen::VectorXd());
    zero.rho = Eigen::VectorXd::Zero(mesh.n_elements());
    prev = to_state(zero, shape, mesh);
  }

  SolveArtifacts art;
  Solution best;
  double last_increment = 1.0;
  bool converged = false;
  int it = 0;
  std::vector<double> history;

  for (it = 1; it <= cfg.max_iters; ++it) {
    const double tau_a = iterate_tau_a(problem.stab, mesh, prev.u_elem);
    LocalAssemblyContext ctx;
    ctx.mesh = &mesh;
    ctx.tables = &tables;
    ctx.data = &problem.data;
    ctx.tau = {tau0.tau_d, tau_a, problem.stab.norm_mode == TauConvNorm::per_face_upwind,
               problem.stab.beta};
    ctx.outflow_as_neumann = problem.outflow_mode == OutflowMode::homogeneous_neumann;
    ctx.conv.kind = ConvectionField::Kind::ns_iterate;
    ctx.conv.u_elem = &prev.u_elem;
    ctx.conv.u_hat = &prev.u_hat;
    ctx.newton = true;

    art.admissibility = admissibility_check(mesh, tables, ctx.tau, ctx.conv, problem.data,
                                            problem.admissibility_gamma);
    if (!art.admissibility.pass && problem.strict_admissibility)
      throw std::runtime_error("solve_navier_stokes: admissibility condition violated (margin " +
                               std::to_string(art.admissibility.margin) + ")");

    const std::vector<CondensedElement> elems =
        condense_all(ctx, mesh.n_elements(), problem.threads);
    const GlobalSystem sys = assemble_global(elems, mesh, problem.outflow_mode, false);

    // The assembled linearization satisfies A(x_prev) x_prev - b(x_prev) =
    // condensed nonlinear residual at x_prev.
    const double bnorm = sys.rhs.norm();
    const double res = (sys.A * prev.raw - sys.rhs).norm() / (bnorm > 0 ? bnorm : 1.0);
    history.push_back(res);

    const SaddleSolveResult raw = solve_saddle(sys);
    Solution cur = recover_fields(sys, raw, elems, mesh);
    cur.tau_d = tau0.tau_d;
    cur.tau_a = tau_a;
    cur.admissibility_margin = art.admissibility.margin;
    art.structure = structure_checks(sys, Regime::navier_stokes);

    Eigen::VectorXd uhat_new = raw.uhat;
    const double un = uhat_new.norm();
    last_increment =
        (uhat_new - prev.raw.head(sys.dofs.n_hat)).norm() / (un > 1e-30 ? un : 1.0);

    prev = to_state(cur, sys, mesh);
    best = std::move(cur);
    if (res <= cfg.residual_tol && last_increment <= cfg.increment_tol) {
      converged = true;
      break;
    }
  }

  best.newton_converged = converged;
  best.newton_iterations = std::min(it, cfg.max_iters);
  best.newton_residual_history = history;
  art.solution = std::move(best);
  return art;
}

SolveArtifacts solve_flow(const FlowProblem& problem, const NewtonConfig& cfg) {
  if (problem.regime == Regime::navier_stokes) return solve_navier_stokes(problem, cfg);
  return solve_linear_flow(problem);
}

Eigen::VectorXd compatibility_residuals(const Mesh& mesh, const AssemblyTables& t,
                                        const Solution& sol, const ProblemData& data) {
  const int nfn = t.face.nen;
  const int nqf = static_cast<int>(t.face_quad.weights.size());
  Eigen::VectorXd res = Eigen::VectorXd::Zero(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double acc = 0.0;
    for (int f = 0; f < t.elem.nfaces; ++f) {
      const ElementFaceRef ref = mesh.elem_faces[e][f];
      const bool dirichlet = mesh.faces[ref.face].tag == FaceTag::dirichlet;
      const FaceQuadrature fg = element_face_quadrature(mesh, t, e, f);
      std::vector<int> col(nfn);
      for (int i = 0; i < nfn; ++i) col[i] = ref.reversed ? t.reversal[i] : i;
      for (int g = 0; g < nqf; ++g) {
        const Eigen::Vector2d n = fg.normal.row(g).transpose();
        Eigen::Vector2d v;
        if (dirichlet)
          v = data.dirichlet ? data.dirichlet(fg.x.row(g).transpose())
                             : Eigen::Vector2d::Zero().eval();
        else
          v = face_value(sol.uhat[ref.face], t.face_N, g, col);
        acc += v.dot(n) * fg.dS(g);
      }
    }
    res(e) = acc;
  }
  return res;
}

double transmission_residual(const Mesh& mesh, const AssemblyTables& t, const Solution& sol,
                             double tau) {
  const int nfn = t.face.nen;
  const int nqf = static_cast<int>(t.face_quad.weights.size());
  const int msd = t.vd.msd;
  std::vector<Eigen::VectorXd> face_res(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) face_res[f] = Eigen::VectorXd::Zero(2 * nfn);

  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int f = 0; f < t.elem.nfaces; ++f) {
      const ElementFaceRef ref = mesh.elem_faces[e][f];
      if (mesh.faces[ref.face].right < 0) continue;  // interior faces only
      const FaceQuadrature fg = element_face_quadrature(mesh, t, e, f);
      const Eigen::MatrixXd& Ne = t.elem_N_face[f];
      std::vector<int> col(nfn);
      for (int i = 0; i < nfn; ++i) col[i] = ref.reversed ? t.reversal[i] : i;
      for (int g = 0; g < nqf; ++g) {
        const Eigen::Vector2d n = fg.normal.row(g).transpose();
        const Eigen::MatrixXd Nn = normal_operator(n);
        Eigen::VectorXd Lg = Eigen::VectorXd::Zero(msd);
        Eigen::Vector2d ug = Eigen::Vector2d::Zero();
        double pg = 0.0;
        for (int j = 0; j < t.elem.nen; ++j) {
          Lg += Ne(g, j) * sol.L[e].segment(j * msd, msd);
          ug += Ne(g, j) * sol.u[e].segment<2>(2 * j);
          pg += Ne(g, j) * sol.p[e](j);
        }
        const Eigen::Vector2d uhat_g = face_value(sol.uhat[ref.face], t.face_N, g, col);
        const Eigen::Vector2d flux =
            Nn.transpose() * (t.ops.Dhalf * Lg) + pg * n + tau * (ug - uhat_g);
        for (int i = 0; i < nfn; ++i)
          face_res[ref.face].segment<2>(2 * col[i]) += t.face_N(g, i) * flux * fg.dS(g);
      }
    }
  }
  double worst = 0.0;
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (mesh.faces[f].right >= 0) worst = std::max(worst, face_res[f].cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace hdgflow
