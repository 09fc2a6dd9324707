#include "hdgflow/global_system.hpp"

#include <Eigen/SparseLU>
#include <fstream>
#include <stdexcept>

namespace hdgflow {

DofMap build_dof_map(const Mesh& mesh) {
  DofMap map;
  map.nfn = mesh.degree + 1;
  map.face_offset.assign(mesh.n_faces(), -1);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.faces[f].tag == FaceTag::dirichlet) continue;
    map.face_offset[f] = map.n_hat;
    map.n_hat += 2 * map.nfn;
  }
  map.n_el = mesh.n_elements();
  if (map.size() == 0) throw std::runtime_error("build_dof_map: empty global system");
  return map;
}

GlobalSystem init_system_shape(const Mesh& mesh, OutflowMode outflow_mode) {
  GlobalSystem sys;
  sys.dofs = build_dof_map(mesh);
  sys.pure_dirichlet = mesh.pure_dirichlet();
  const int nfn = sys.dofs.nfn;

  // Outflow rotations: rows [n; t] per hybrid node of an outflow face.
  sys.rotations.assign(sys.dofs.n_hat / 2, Eigen::Matrix2d::Identity());
  sys.constrained.assign(sys.dofs.n_hat, 0);
  if (outflow_mode == OutflowMode::outflow) {
    for (int f = 0; f < mesh.n_faces(); ++f) {
      if (mesh.faces[f].tag != FaceTag::outflow) continue;
      const Eigen::Vector2d a = mesh.nodes.row(mesh.faces[f].nodes[0]);
      const Eigen::Vector2d b = mesh.nodes.row(mesh.faces[f].nodes[1]);
      Eigen::Vector2d t = (b - a).normalized();
      // boundary face: owner traversal is counterclockwise, outward normal
      Eigen::Vector2d nrm(t(1), -t(0));
      Eigen::Matrix2d R;
      R.row(0) = nrm.transpose();
      R.row(1) = t.transpose();
      const int off = sys.dofs.face_offset[f];
      for (int i = 0; i < nfn; ++i) {
        sys.rotations[off / 2 + i] = R;
        sys.constrained[off + 2 * i + 1] = 1;  // tangential component
      }
      sys.any_rotation = true;
    }
  }
  return sys;
}

GlobalSystem assemble_global(const std::vector<CondensedElement>& elems, const Mesh& mesh,
                             OutflowMode outflow_mode, bool expect_symmetric) {
  GlobalSystem sys = init_system_shape(mesh, outflow_mode);
  const int n = sys.dofs.size();
  const int nfn = sys.dofs.nfn;

  const auto node_rot = [&](int dof) -> const Eigen::Matrix2d& {
    return sys.rotations[dof / 2];
  };

  std::vector<Eigen::Triplet<double>> trips;
  sys.rhs = Eigen::VectorXd::Zero(n);
  double max_entry = 0.0;

  sys.max_HG_mismatch = 0.0;
  for (const CondensedElement& ce : elems) {
    std::vector<int> gdof(ce.n_hat);
    for (size_t a = 0; a < ce.hat_global_faces.size(); ++a) {
      const int off = sys.dofs.face_offset[ce.hat_global_faces[a]];
      if (off < 0) throw std::runtime_error("assemble_global: hat face maps to Dirichlet face");
      for (int i = 0; i < 2 * nfn; ++i) gdof[ce.hat_offsets[a] + i] = off + i;
    }

    if (ce.n_hat > 0) {
      const double gn = ce.G.cwiseAbs().maxCoeff();
      const double hg = (ce.H - ce.G).cwiseAbs().maxCoeff();
      sys.max_HG_mismatch = std::max(sys.max_HG_mismatch, gn > 0 ? hg / gn : hg);
    }

    // rotate nodal blocks where needed
    Eigen::MatrixXd K = ce.Khat;
    Eigen::VectorXd G = ce.G;
    Eigen::VectorXd fu = ce.fhat_u;
    if (sys.any_rotation) {
      for (int i = 0; i < ce.n_hat / 2; ++i) {
        const Eigen::Matrix2d& R = node_rot(gdof[2 * i]);
        K.middleRows(2 * i, 2) = R * K.middleRows(2 * i, 2);
        G.segment<2>(2 * i) = R * G.segment<2>(2 * i);
        fu.segment<2>(2 * i) = R * fu.segment<2>(2 * i);
      }
      for (int j = 0; j < ce.n_hat / 2; ++j) {
        const Eigen::Matrix2d& R = node_rot(gdof[2 * j]);
        K.middleCols(2 * j, 2) = K.middleCols(2 * j, 2) * R.transpose();
      }
    }

    for (int i = 0; i < ce.n_hat; ++i) {
      for (int j = 0; j < ce.n_hat; ++j)
        if (K(i, j) != 0.0) trips.emplace_back(gdof[i], gdof[j], K(i, j));
      const int r = sys.dofs.rho_index(ce.elem);
      if (G(i) != 0.0) {
        trips.emplace_back(gdof[i], r, G(i));  // rho column
        trips.emplace_back(r, gdof[i], G(i));  // compatibility row (transpose)
      }
      sys.rhs(gdof[i]) += fu(i);
    }
    sys.rhs(sys.dofs.rho_index(ce.elem)) += ce.fhat_rho;
  }

  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());

  if (expect_symmetric) {
    Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(sys.A.transpose()) - sys.A;
    double num = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
        num = std::max(num, std::abs(it.value()));
    for (int k = 0; k < sys.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it)
        max_entry = std::max(max_entry, std::abs(it.value()));
    sys.asymmetry = max_entry > 0 ? num / max_entry : num;
  }

  // Pure-Dirichlet pressure indeterminacy: replace the compatibility row of
  // element 0 with sum_e rho_e = 0.
  std::vector<char> replaced(n, 0);
  if (sys.pure_dirichlet) {
    replaced[sys.dofs.rho_index(0)] = 1;
    sys.regularized = true;
  }
  for (int d = 0; d < sys.dofs.n_hat; ++d)
    if (sys.constrained[d]) replaced[d] = 1;

  if (sys.regularized || sys.any_rotation) {
    std::vector<Eigen::Triplet<double>> kept;
    kept.reserve(trips.size());
    for (const auto& t : trips)
      if (!replaced[t.row()]) kept.push_back(t);
    if (sys.regularized) {
      const int r0 = sys.dofs.rho_index(0);
      for (int e = 0; e < sys.dofs.n_el; ++e) kept.emplace_back(r0, sys.dofs.rho_index(e), 1.0);
      sys.rhs(r0) = 0.0;
    }
    for (int d = 0; d < sys.dofs.n_hat; ++d)
      if (sys.constrained[d]) {
        kept.emplace_back(d, d, 1.0);
        sys.rhs(d) = 0.0;
      }
    sys.A.setFromTriplets(kept.begin(), kept.end());
  }
  sys.A.makeCompressed();
  return sys;
}

SaddleSolveResult solve_saddle(const GlobalSystem& sys) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(sys.A);
  lu.factorize(sys.A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_saddle: sparse factorization failed (" + lu.lastErrorMessage() +
                             "); check stabilization admissibility and mesh quality");
  SaddleSolveResult out;
  const Eigen::VectorXd x = lu.solve(sys.rhs);
  const double bnorm = sys.rhs.norm();
  out.residual = (sys.A * x - sys.rhs).norm() / (bnorm > 0 ? bnorm : 1.0);
  if (out.residual > 1e-10)
    throw std::runtime_error("solve_saddle: relative residual " + std::to_string(out.residual) +
                             " exceeds 1e-10");
  out.uhat = x.head(sys.dofs.n_hat);
  out.rho = x.tail(sys.dofs.n_el);
  return out;
}

Solution recover_fields(const GlobalSystem& sys, const SaddleSolveResult& sol,
                        const std::vector<CondensedElement>& elems, const Mesh& mesh) {
  const int nfn = sys.dofs.nfn;
  Solution out;
  out.solve_residual = sol.residual;
  out.rho = sol.rho;
  out.uhat.assign(mesh.n_faces(), Eigen::VectorXd());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const int off = sys.dofs.face_offset[f];
    if (off < 0) continue;
    Eigen::VectorXd v = sol.uhat.segment(off, 2 * nfn);
    if (sys.any_rotation)
      for (int i = 0; i < nfn; ++i)
        v.segment<2>(2 * i) = sys.rotations[off / 2 + i].transpose() * v.segment<2>(2 * i);
    out.uhat[f] = std::move(v);
  }

  const int nel = mesh.n_elements();
  out.L.resize(nel);
  out.u.resize(nel);
  out.p.resize(nel);
  out.zeta.resize(nel);
  const ReferenceElement re = reference_element(mesh.elem_type, mesh.degree);
  for (const CondensedElement& ce : elems) {
    if (ce.elem < 0 || ce.elem >= nel) throw std::runtime_error("recover_fields: bad element id");
    Eigen::VectorXd uhat_e(ce.n_hat);
    for (size_t a = 0; a < ce.hat_global_faces.size(); ++a)
      uhat_e.segment(ce.hat_offsets[a], 2 * nfn) = out.uhat[ce.hat_global_faces[a]];
    const LocalSolution ls = ce.recover(uhat_e, sol.rho(ce.elem), re.nen, 3);
    out.L[ce.elem] = ls.L;
    out.u[ce.elem] = ls.u;
    out.p[ce.elem] = ls.p;
    out.zeta[ce.elem] = ls.zeta;
  }
  return out;
}

StructureReport structure_checks(const GlobalSystem& sys, Regime regime) {
  StructureReport rep;
  rep.asymmetry = sys.asymmetry;
  rep.max_HG_mismatch = sys.max_HG_mismatch;
  rep.pure_dirichlet = sys.pure_dirichlet;
  rep.regularized = sys.regularized;
  rep.n_hat = sys.dofs.n_hat;
  rep.n_rho = sys.dofs.n_el;
  rep.nnz = static_cast<int>(sys.A.nonZeros());
  rep.symmetry_applicable = regime == Regime::stokes;
  return rep;
}

void dump_matrix_coordinate(const GlobalSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_matrix_coordinate: cannot open " + path);
  out.precision(17);
  out << sys.A.rows() << " " << sys.A.cols() << " " << sys.A.nonZeros() << "\n";
  for (int k = 0; k < sys.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it)
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace hdgflow
