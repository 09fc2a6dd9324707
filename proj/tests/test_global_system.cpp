#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "hdgflow/cases.hpp"
#include "hdgflow/dense_linalg.hpp"
#include "hdgflow/flow_solvers.hpp"
#include "hdgflow/global_system.hpp"

using namespace hdgflow;

namespace {

std::vector<CondensedElement> condense_mesh(const Mesh& mesh, const ProblemData& data,
                                            double tau) {
  const AssemblyTables tables = make_assembly_tables(mesh.elem_type, mesh.degree, data.nu);
  LocalAssemblyContext ctx;
  ctx.mesh = &mesh;
  ctx.tables = &tables;
  ctx.data = &data;
  ctx.tau = {tau, 0.0, false, 0.0};
  std::vector<CondensedElement> out;
  for (int e = 0; e < mesh.n_elements(); ++e)
    out.push_back(condense(assemble_local_blocks(ctx, e)));
  return out;
}

}  // namespace

TEST_CASE("two-triangle all-Dirichlet mesh has 6 unknowns") {
  Mesh mesh = structured_mesh({0, 0, 1, 1}, 1, 1, ElemType::simplex, 1);
  classify_all_dirichlet(mesh);
  const DofMap map = build_dof_map(mesh);
  CHECK(map.n_hat == 4);  // 1 interior face x 2 nodes x 2 components
  CHECK(map.n_el == 2);
  CHECK(map.size() == 6);
}

TEST_CASE("Stokes global matrix is symmetric") {
  Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 2);
  classify_boundary(mesh,
                    {{FaceTag::neumann, [](const Eigen::Vector2d& x) { return x(1) < 1e-12; }},
                     {FaceTag::dirichlet, [](const Eigen::Vector2d& x) { return x(1) >= 1e-12; }}});
  ProblemData data;
  data.nu = 1.0;
  data.dirichlet = [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x(1), -x(0)); };
  const GlobalSystem sys =
      assemble_global(condense_mesh(mesh, data, 3.0), mesh, OutflowMode::outflow, true);
  CHECK(sys.asymmetry <= 1e-12);
  CHECK(sys.max_HG_mismatch <= 1e-11);
  CHECK_FALSE(sys.pure_dirichlet);
  CHECK_FALSE(sys.regularized);
}

TEST_CASE("Oseen off-diagonal blocks stay transposes of each other") {
  Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 1);
  classify_boundary(mesh,
                    {{FaceTag::neumann, [](const Eigen::Vector2d& x) { return x(1) < 1e-12; }},
                     {FaceTag::dirichlet, [](const Eigen::Vector2d& x) { return x(1) >= 1e-12; }}});
  const AssemblyTables tables = make_assembly_tables(ElemType::simplex, 1, 1.0);
  ProblemData data;
  data.dirichlet = [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x(1), 0.1 * x(0)); };
  LocalAssemblyContext ctx;
  ctx.mesh = &mesh;
  ctx.tables = &tables;
  ctx.data = &data;
  ctx.tau = {1.0, 0.5, false, 0.0};
  ctx.conv.kind = ConvectionField::Kind::analytic;
  ctx.conv.analytic = [](const Eigen::Vector2d& x) { return Eigen::Vector2d(1.0 + x(1), 0.5); };
  std::vector<CondensedElement> elems;
  for (int e = 0; e < mesh.n_elements(); ++e)
    elems.push_back(condense(assemble_local_blocks(ctx, e)));
  const GlobalSystem sys = assemble_global(elems, mesh, OutflowMode::outflow, false);
  CHECK(sys.max_HG_mismatch <= 1e-11);

  // Khat itself is unsymmetric under convection
  double khat_asym = 0.0;
  const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.A);
  const int nh = sys.dofs.n_hat;
  khat_asym = (dense.topLeftCorner(nh, nh) - dense.topLeftCorner(nh, nh).transpose())
                  .cwiseAbs()
                  .maxCoeff();
  CHECK(khat_asym > 1e-8);
  // G column block vs compatibility row block
  const Eigen::MatrixXd G12 = dense.topRightCorner(nh, sys.dofs.n_el);
  const Eigen::MatrixXd G21 = dense.bottomLeftCorner(sys.dofs.n_el, nh);
  CHECK((G12 - G21.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero data gives the zero solution") {
  Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 1);
  classify_boundary(mesh,
                    {{FaceTag::neumann, [](const Eigen::Vector2d& x) { return x(1) < 1e-12; }},
                     {FaceTag::dirichlet, [](const Eigen::Vector2d& x) { return x(1) >= 1e-12; }}});
  ProblemData data;
  const std::vector<CondensedElement> elems = condense_mesh(mesh, data, 3.0);
  const GlobalSystem sys = assemble_global(elems, mesh);
  const SaddleSolveResult sol = solve_saddle(sys);
  CHECK(sol.uhat.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(sol.rho.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("polynomial Stokes problem is reproduced through the full pipeline") {
  // u = (x2, -x1) is divergence-free and linear; p = 0; traction from the
  // exact stress on the bottom Neumann boundary.
  const VectorField uex = [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x(1), -x(0)); };
  Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 1);
  classify_boundary(mesh,
                    {{FaceTag::neumann, [](const Eigen::Vector2d& x) { return x(1) < 1e-12; }},
                     {FaceTag::dirichlet, [](const Eigen::Vector2d& x) { return x(1) >= 1e-12; }}});
  ProblemData data;
  data.nu = 1.0;
  data.dirichlet = uex;
  // grad_s u = 0 for this rotation field, so sigma n = 0 on the boundary
  data.traction = [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero().eval(); };
  const std::vector<CondensedElement> elems = condense_mesh(mesh, data, 3.0);
  const GlobalSystem sys = assemble_global(elems, mesh, OutflowMode::outflow, true);
  const SaddleSolveResult raw = solve_saddle(sys);
  CHECK(raw.residual <= 1e-10);
  const Solution sol = recover_fields(sys, raw, elems, mesh);
  const ReferenceElement re = reference_element(ElemType::simplex, 1);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int j = 0; j < re.nen; ++j) {
      const Eigen::Vector2d x = mesh.nodes.row(mesh.elems[e][j]).transpose();
      CHECK(sol.u[e](2 * j) == doctest::Approx(x(1)).epsilon(1e-10));
      CHECK(sol.u[e](2 * j + 1) == doctest::Approx(-x(0)).epsilon(1e-10));
      CHECK(std::abs(sol.p[e](j)) <= 1e-10);
      CHECK(sol.L[e].segment<3>(3 * j).cwiseAbs().maxCoeff() <= 1e-10);
    }
    // <p_e, 1> over the element boundary equals rho_e
    CHECK(std::abs(sol.rho(e)) <= 1e-10);
  }
}

TEST_CASE("recovered solution satisfies the per-element compatibility rows") {
  const AnalyticCase wang = analytic_case("wang");
  Mesh mesh = structured_mesh(wang.domain, 2, 2, ElemType::simplex, 2);
  classify_boundary(mesh, wang.default_taggers());
  const ProblemData data = wang.problem_data(Regime::stokes);
  const std::vector<CondensedElement> elems = condense_mesh(mesh, data, 3.0);
  const GlobalSystem sys = assemble_global(elems, mesh);
  const SaddleSolveResult raw = solve_saddle(sys);
  const Solution sol = recover_fields(sys, raw, elems, mesh);

  const AssemblyTables tables = make_assembly_tables(ElemType::simplex, 2, data.nu);
  const Eigen::VectorXd compat = compatibility_residuals(mesh, tables, sol, data);
  CHECK(compat.cwiseAbs().maxCoeff() <= 1e-10);

  // <p_e,1> = rho_e for every element (constraint row)
  LocalAssemblyContext ctx;
  ctx.mesh = &mesh;
  ctx.tables = &tables;
  ctx.data = &data;
  ctx.tau = {3.0, 0.0, false, 0.0};
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const LocalBlocks b = assemble_local_blocks(ctx, e);
    CHECK(b.a_rhop.dot(sol.p[e]) == doctest::Approx(sol.rho(e)).epsilon(1e-9));
  }

  // interior-face transmission residual vanishes by construction
  const double trans = transmission_residual(mesh, tables, sol, 3.0);
  CHECK(trans <= 1e-9);
}

TEST_CASE("pure-Dirichlet rank deficiency and the pressure-level fix") {
  const AnalyticCase wang = analytic_case("wang");
  Mesh mesh = structured_mesh(wang.domain, 2, 2, ElemType::simplex, 1);
  classify_all_dirichlet(mesh);
  const ProblemData data = wang.problem_data(Regime::stokes);
  const std::vector<CondensedElement> elems = condense_mesh(mesh, data, 3.0);

  // unregularized matrix: assemble manually without the row replacement
  GlobalSystem sys = assemble_global(elems, mesh);
  CHECK(sys.pure_dirichlet);
  CHECK(sys.regularized);
  // densify the pristine saddle matrix (rebuild without the fix applied)
  const DofMap map = build_dof_map(mesh);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(map.size(), map.size());
  for (const CondensedElement& ce : elems) {
    std::vector<int> gdof(ce.n_hat);
    for (size_t a = 0; a < ce.hat_global_faces.size(); ++a)
      for (int i = 0; i < 2 * map.nfn; ++i)
        gdof[ce.hat_offsets[a] + i] = map.face_offset[ce.hat_global_faces[a]] + i;
    for (int i = 0; i < ce.n_hat; ++i) {
      for (int j = 0; j < ce.n_hat; ++j) dense(gdof[i], gdof[j]) += ce.Khat(i, j);
      dense(gdof[i], map.rho_index(ce.elem)) += ce.G(i);
      dense(map.rho_index(ce.elem), gdof[i]) += ce.G(i);
    }
  }
  CHECK(map.size() == 40);
  CHECK(rank_estimate(dense, 1e-10) == map.size() - 1);

  // regularized solve succeeds
  const SaddleSolveResult raw = solve_saddle(sys);
  CHECK(raw.residual <= 1e-10);
  const Solution sol = recover_fields(sys, raw, elems, mesh);
  // gauge: sum of rho vanishes
  CHECK(std::abs(sol.rho.sum()) <= 1e-9);
}

TEST_CASE("solution scales linearly with the data") {
  const AnalyticCase wang = analytic_case("wang");
  Mesh mesh = structured_mesh(wang.domain, 2, 2, ElemType::simplex, 1);
  classify_boundary(mesh, wang.default_taggers());
  const ProblemData base = wang.problem_data(Regime::stokes);
  const double c = 3.7;
  ProblemData scaled = base;
  scaled.source = [&base, c](const Eigen::Vector2d& x) { return (c * base.source(x)).eval(); };
  scaled.dirichlet = [&base, c](const Eigen::Vector2d& x) {
    return (c * base.dirichlet(x)).eval();
  };
  scaled.traction = [&base, c](const Eigen::Vector2d& x) { return (c * base.traction(x)).eval(); };

  const std::vector<CondensedElement> e1 = condense_mesh(mesh, base, 3.0);
  const std::vector<CondensedElement> e2 = condense_mesh(mesh, scaled, 3.0);
  const GlobalSystem s1 = assemble_global(e1, mesh);
  const GlobalSystem s2 = assemble_global(e2, mesh);
  const SaddleSolveResult r1 = solve_saddle(s1);
  const SaddleSolveResult r2 = solve_saddle(s2);
  CHECK((r2.uhat - c * r1.uhat).cwiseAbs().maxCoeff() <=
        1e-12 * std::max(1.0, r2.uhat.cwiseAbs().maxCoeff()));
  CHECK((r2.rho - c * r1.rho).cwiseAbs().maxCoeff() <=
        1e-12 * std::max(1.0, r2.rho.cwiseAbs().maxCoeff()));
}

TEST_CASE("structure report and matrix dump") {
  const AnalyticCase wang = analytic_case("wang");
  Mesh mesh = structured_mesh(wang.domain, 2, 2, ElemType::simplex, 1);
  classify_boundary(mesh, wang.default_taggers());
  const ProblemData data = wang.problem_data(Regime::stokes);
  const GlobalSystem sys =
      assemble_global(condense_mesh(mesh, data, 3.0), mesh, OutflowMode::outflow, true);
  const StructureReport rep = structure_checks(sys, Regime::stokes);
  CHECK(rep.symmetry_applicable);
  CHECK(rep.asymmetry <= 1e-12);
  CHECK(rep.n_rho == 8);
  CHECK(rep.nnz > 0);

  dump_matrix_coordinate(sys, "matrix_dump.txt");
  std::FILE* f = std::fopen("matrix_dump.txt", "r");
  REQUIRE(f != nullptr);
  long r = 0, c2 = 0, nnz = 0;
  REQUIRE(std::fscanf(f, "%ld %ld %ld", &r, &c2, &nnz) == 3);
  CHECK(r == sys.dofs.size());
  CHECK(nnz == rep.nnz);
  std::fclose(f);
  std::remove("matrix_dump.txt");
}
