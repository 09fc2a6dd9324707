#include "hdgflow/local_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdgflow/dense_linalg.hpp"

namespace hdgflow {

AssemblyTables make_assembly_tables(ElemType elem_type, int k, double nu) {
  AssemblyTables t;
  t.elem = reference_element(elem_type, k);
  t.face = reference_element(ElemType::segment, k);
  t.face_quad = quadrature_rule(ElemType::segment, 2 * k + 2);
  t.face_N = t.face.eval(t.face_quad.points);
  t.reversal = ReferenceElement::segment_reversal(k);
  for (int f = 0; f < t.elem.nfaces; ++f) {
    const Eigen::MatrixXd pts = t.elem.face_point_coords(f, t.face_quad.points.col(0));
    t.elem_N_face.push_back(t.elem.eval(pts));
    t.elem_dN_face.push_back(t.elem.eval_grad(pts));
  }
  t.vd = voigt_dims(2);
  t.ops = constitutive_operators(nu, 2);
  for (int kk = 0; kk < 2; ++kk) t.DhalfF.push_back(t.ops.Dhalf * t.ops.F[kk]);
  return t;
}

int local_system_dimension(ElemType elem_type, int nsd, int k) {
  if (k < 1) throw std::invalid_argument("local_system_dimension: k >= 1 required");
  const VoigtDims vd = voigt_dims(nsd);
  long nen = 0;
  if (elem_type == ElemType::simplex)
    nen = (nsd == 2) ? static_cast<long>(k + 1) * (k + 2) / 2
                     : static_cast<long>(k + 1) * (k + 2) * (k + 3) / 6;
  else if (elem_type == ElemType::quad)
    nen = (nsd == 2) ? static_cast<long>(k + 1) * (k + 1)
                     : static_cast<long>(k + 1) * (k + 1) * (k + 1);
  else
    throw std::invalid_argument("local_system_dimension: unsupported element type");
  return static_cast<int>((vd.msd + nsd + 1) * nen + 1);
}

FaceQuadrature element_face_quadrature(const Mesh& mesh, const AssemblyTables& t, int e, int f) {
  const std::vector<int>& local = t.elem.face_nodes[f];
  Eigen::MatrixXd coords(local.size(), 2);
  for (size_t a = 0; a < local.size(); ++a)
    coords.row(static_cast<Eigen::Index>(a)) = mesh.nodes.row(mesh.elems[e][local[a]]);
  const int nq = static_cast<int>(t.face_quad.weights.size());
  const Eigen::MatrixXd dNs = t.face.eval_grad(t.face_quad.points)[0];
  FaceQuadrature geo;
  geo.x = t.face_N * coords;
  geo.normal.resize(nq, 2);
  geo.dS.resize(nq);
  for (int g = 0; g < nq; ++g) {
    const Eigen::RowVector2d tang = dNs.row(g) * coords;
    const double len = tang.norm();
    if (!(len > 0.0)) throw std::runtime_error("element_face_quadrature: degenerate face");
    geo.dS(g) = len * t.face_quad.weights(g);
    // counterclockwise element boundary: outward normal is the tangent
    // rotated clockwise
    geo.normal(g, 0) = tang(1) / len;
    geo.normal(g, 1) = -tang(0) / len;
  }
  return geo;
}

LocalBlocks assemble_local_blocks(const LocalAssemblyContext& ctx, int e) {
  const Mesh& mesh = *ctx.mesh;
  const AssemblyTables& t = *ctx.tables;
  const ProblemData& data = *ctx.data;
  const int nen = t.elem.nen;
  const int nfn = t.face.nen;
  const int msd = t.vd.msd;
  const bool ns = ctx.conv.kind == ConvectionField::Kind::ns_iterate;
  if (ns && (!ctx.conv.u_elem || !ctx.conv.u_hat))
    throw std::invalid_argument("assemble_local_blocks: missing Navier-Stokes iterate");

  const auto dirichlet_value = [&data](const Eigen::Vector2d& x) {
    return data.dirichlet ? data.dirichlet(x) : Eigen::Vector2d::Zero().eval();
  };

  LocalBlocks b;
  b.elem = e;
  b.nen = nen;
  b.nfn = nfn;
  const int nL = msd * nen, nu = 2 * nen, np = nen;
  b.A_LL = Eigen::MatrixXd::Zero(nL, nL);
  b.A_Lu = Eigen::MatrixXd::Zero(nL, nu);
  b.A_uu = Eigen::MatrixXd::Zero(nu, nu);
  b.A_pu = Eigen::MatrixXd::Zero(np, nu);
  b.a_rhop = Eigen::VectorXd::Zero(np);
  b.f_L = Eigen::VectorXd::Zero(nL);
  b.f_u = Eigen::VectorXd::Zero(nu);
  b.f_p = Eigen::VectorXd::Zero(np);

  // Hybrid column layout over non-Dirichlet faces.
  for (int f = 0; f < t.elem.nfaces; ++f) {
    const ElementFaceRef ref = mesh.elem_faces[e][f];
    if (mesh.faces[ref.face].tag == FaceTag::dirichlet) continue;
    b.hat_faces.push_back(f);
    b.hat_global_faces.push_back(ref.face);
    b.hat_offsets.push_back(b.n_hat);
    b.n_hat += 2 * nfn;
  }
  b.A_Lhat = Eigen::MatrixXd::Zero(nL, b.n_hat);
  b.A_uhat = Eigen::MatrixXd::Zero(nu, b.n_hat);
  b.A_phat = Eigen::MatrixXd::Zero(np, b.n_hat);
  b.A_hatu = Eigen::MatrixXd::Zero(b.n_hat, nu);
  b.A_hathat = Eigen::MatrixXd::Zero(b.n_hat, b.n_hat);
  b.f_hat = Eigen::VectorXd::Zero(b.n_hat);

  // ---- volume terms ----
  const MappedGeometry geo = map_element_tabulated(mesh.element_coords(e), t.elem.N, t.elem.dN);
  const int nq = static_cast<int>(t.elem.quad.weights.size());
  const Eigen::VectorXd* uprev = ns ? &(*ctx.conv.u_elem)[e] : nullptr;
  for (int g = 0; g < nq; ++g) {
    const double dV = geo.detJ(g) * t.elem.quad.weights(g);
    const Eigen::MatrixXd& dN = geo.grad[g];  // nen x 2 physical gradients
    const Eigen::Vector2d xg = geo.x.row(g).transpose();

    Eigen::Vector2d a_g = Eigen::Vector2d::Zero();
    if (ctx.conv.kind == ConvectionField::Kind::analytic)
      a_g = ctx.conv.analytic(xg);
    else if (ns)
      for (int l = 0; l < nen; ++l) a_g += t.elem.N(g, l) * uprev->segment<2>(2 * l);

    for (int j = 0; j < nen; ++j) {
      const double Nj = t.elem.N(g, j);
      // Voigt strain operator of basis function j: B_j = sum_k F_k dN_j/dx_k
      Eigen::MatrixXd DB = dN(j, 0) * t.DhalfF[0] + dN(j, 1) * t.DhalfF[1];  // msd x 2
      for (int l = 0; l < nen; ++l) {
        const double Nl = t.elem.N(g, l);
        const double mass = Nj * Nl * dV;
        for (int m = 0; m < msd; ++m) b.A_LL(j * msd + m, l * msd + m) -= mass;
        for (int m = 0; m < msd; ++m)
          for (int c = 0; c < 2; ++c) b.A_Lu(j * msd + m, l * 2 + c) += DB(m, c) * Nl * dV;
        for (int c = 0; c < 2; ++c) b.A_pu(j, l * 2 + c) += dN(j, c) * Nl * dV;
        if (ctx.conv.kind != ConvectionField::Kind::none) {
          const double adv = (a_g(0) * dN(j, 0) + a_g(1) * dN(j, 1)) * Nl * dV;
          for (int c = 0; c < 2; ++c) b.A_uu(j * 2 + c, l * 2 + c) -= adv;
        }
        if (ns && ctx.newton) {
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              b.A_uu(j * 2 + c, l * 2 + d) -= a_g(c) * dN(j, d) * Nl * dV;
        }
      }
      if (data.source) {
        const Eigen::Vector2d s = data.source(xg);
        b.f_u.segment<2>(2 * j) += Nj * s * dV;
      }
      if (ns && ctx.newton) {
        const double adv_prev = a_g(0) * dN(j, 0) + a_g(1) * dN(j, 1);
        b.f_u.segment<2>(2 * j) -= adv_prev * a_g * dV;
      }
    }
  }

  // ---- face terms ----
  const int nqf = static_cast<int>(t.face_quad.weights.size());
  int hat_block = 0;
  for (int f = 0; f < t.elem.nfaces; ++f) {
    const ElementFaceRef ref = mesh.elem_faces[e][f];
    const MeshFace& face = mesh.faces[ref.face];
    const bool dirichlet = face.tag == FaceTag::dirichlet;
    const FaceQuadrature fg = element_face_quadrature(mesh, t, e, f);
    const Eigen::MatrixXd& Ne = t.elem_N_face[f];  // element basis at face points

    // canonical column index of the element-side face node i
    std::vector<int> col(nfn);
    for (int i = 0; i < nfn; ++i) col[i] = ref.reversed ? t.reversal[i] : i;

    const int off = dirichlet ? -1 : b.hat_offsets[hat_block];
    const Eigen::VectorXd* hat_prev = (ns && !dirichlet) ? &(*ctx.conv.u_hat)[ref.face] : nullptr;

    // face stabilization (constant per face unless the upwind variant is on)
    double tau_f = ctx.tau.tau_d + ctx.tau.tau_a;
    if (ctx.tau.upwind && ctx.conv.kind != ConvectionField::Kind::none) {
      double worst = 0.0;
      for (int g = 0; g < nqf; ++g) {
        Eigen::Vector2d ahat = Eigen::Vector2d::Zero();
        const Eigen::Vector2d xg = fg.x.row(g).transpose();
        if (ctx.conv.kind == ConvectionField::Kind::analytic)
          ahat = ctx.conv.analytic(xg);
        else if (dirichlet)
          ahat = dirichlet_value(xg);
        else
          for (int i = 0; i < nfn; ++i)
            ahat += t.face_N(g, i) * hat_prev->segment<2>(2 * col[i]);
        worst = std::max(worst, ahat.dot(fg.normal.row(g).transpose()));
      }
      tau_f = ctx.tau.tau_d + ctx.tau.upwind_beta * worst;
    }

    for (int g = 0; g < nqf; ++g) {
      const double dS = fg.dS(g);
      const Eigen::Vector2d n = fg.normal.row(g).transpose();
      const Eigen::Vector2d xg = fg.x.row(g).transpose();
      const Eigen::MatrixXd Nn = normal_operator(n);        // msd x 2
      const Eigen::MatrixXd DhNn = t.ops.Dhalf * Nn;        // msd x 2

      Eigen::Vector2d ahat = Eigen::Vector2d::Zero();
      if (ctx.conv.kind == ConvectionField::Kind::analytic)
        ahat = ctx.conv.analytic(xg);
      else if (ns && dirichlet)
        ahat = dirichlet_value(xg);
      else if (ns)
        for (int i = 0; i < nfn; ++i) ahat += t.face_N(g, i) * hat_prev->segment<2>(2 * col[i]);
      const double an = ahat.dot(n);

      for (int j = 0; j < nen; ++j) {
        const double Nj = Ne(g, j);
        b.a_rhop(j) += Nj * dS;
        // tau face mass on every face of the element
        for (int l = 0; l < nen; ++l) {
          const double m = tau_f * Nj * Ne(g, l) * dS;
          b.A_uu(j * 2 + 0, l * 2 + 0) += m;
          b.A_uu(j * 2 + 1, l * 2 + 1) += m;
        }
        if (dirichlet) {
          const Eigen::Vector2d uD = dirichlet_value(xg);
          b.f_L.segment(j * msd, msd) += Nj * (DhNn * uD) * dS;
          b.f_u.segment<2>(2 * j) += Nj * (tau_f - an) * uD * dS;
          b.f_p(j) += Nj * uD.dot(n) * dS;
        } else {
          for (int i = 0; i < nfn; ++i) {
            const double Nhat = t.face_N(g, i);
            const int ci = off + 2 * col[i];
            for (int m = 0; m < msd; ++m)
              for (int c = 0; c < 2; ++c)
                b.A_Lhat(j * msd + m, ci + c) += Nj * Nhat * DhNn(m, c) * dS;
            for (int c = 0; c < 2; ++c) {
              b.A_uhat(j * 2 + c, ci + c) += Nj * Nhat * (tau_f - an) * dS;
              b.A_phat(j, ci + c) += Nj * Nhat * n(c) * dS;
            }
            if (ns && ctx.newton)
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                  b.A_uhat(j * 2 + c, ci + d) -= Nj * Nhat * ahat(c) * n(d) * dS;
          }
          if (ns && ctx.newton) b.f_u.segment<2>(2 * j) += Nj * an * ahat * dS;
        }
      }

      b.boundary_measure += dS;

      if (!dirichlet) {
        // global transmission couplings on this face
        const bool neumann_like =
            face.tag == FaceTag::neumann ||
            (face.tag == FaceTag::outflow && ctx.outflow_as_neumann);
        for (int i = 0; i < nfn; ++i) {
          const double Ni = t.face_N(g, i);
          const int ri = off + 2 * col[i];
          for (int l = 0; l < nen; ++l) {
            const double m = tau_f * Ni * Ne(g, l) * dS;
            b.A_hatu(ri + 0, l * 2 + 0) += m;
            b.A_hatu(ri + 1, l * 2 + 1) += m;
          }
          for (int i2 = 0; i2 < nfn; ++i2) {
            const double NN = Ni * t.face_N(g, i2) * dS;
            const int ci = off + 2 * col[i2];
            const double coef = neumann_like ? (tau_f - an) : tau_f;
            b.A_hathat(ri + 0, ci + 0) -= coef * NN;
            b.A_hathat(ri + 1, ci + 1) -= coef * NN;
            if (ns && ctx.newton && neumann_like)
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                  b.A_hathat(ri + c, ci + d) += NN * (ahat(c) * n(d) + an * (c == d ? 1.0 : 0.0));
          }
          if (face.tag == FaceTag::neumann && data.traction) {
            const Eigen::Vector2d tr = data.traction(xg);
            b.f_hat.segment<2>(ri) -= Ni * tr * dS;
          }
          if (ns && ctx.newton && neumann_like)
            b.f_hat.segment<2>(ri) += Ni * an * ahat * dS;
        }
      }
    }
    if (!dirichlet) ++hat_block;
  }
  return b;
}

Eigen::MatrixXd local_matrix(const LocalBlocks& b) {
  const int msd = 3;
  const int nen = b.nen;
  const int nL = msd * nen, nu = 2 * nen, np = nen;
  const int n = nL + nu + np + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  K.block(0, 0, nL, nL) = b.A_LL;
  K.block(0, nL, nL, nu) = b.A_Lu;
  K.block(nL, 0, nu, nL) = b.A_Lu.transpose();
  K.block(nL, nL, nu, nu) = b.A_uu;
  K.block(nL, nL + nu, nu, np) = b.A_pu.transpose();
  K.block(nL + nu, nL, np, nu) = b.A_pu;
  K.block(nL + nu, n - 1, np, 1) = b.a_rhop;
  K.block(n - 1, nL + nu, 1, np) = b.a_rhop.transpose();
  return K;
}

namespace {

Eigen::MatrixXd hat_matrix(const LocalBlocks& b) {
  const int nL = 3 * b.nen, nu = 2 * b.nen, np = b.nen;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nL + nu + np + 1, b.n_hat);
  A.topRows(nL) = b.A_Lhat;
  A.middleRows(nL, nu) = b.A_uhat;
  A.middleRows(nL + nu, np) = b.A_phat;
  return A;
}

Eigen::VectorXd rhs_vector(const LocalBlocks& b) {
  const int nL = 3 * b.nen, nu = 2 * b.nen, np = b.nen;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(nL + nu + np + 1);
  f.head(nL) = b.f_L;
  f.segment(nL, nu) = b.f_u;
  f.segment(nL + nu, np) = b.f_p;
  return f;
}

LocalSolution split_solution(const Eigen::VectorXd& x, int nen, int msd) {
  LocalSolution s;
  s.L = x.head(msd * nen);
  s.u = x.segment(msd * nen, 2 * nen);
  s.p = x.segment((msd + 2) * nen, nen);
  s.zeta = x(x.size() - 1);
  return s;
}

}  // namespace

LocalSolution local_solve(const LocalBlocks& b, const Eigen::VectorXd& uhat_e, double rho_e) {
  if (uhat_e.size() != b.n_hat)
    throw std::invalid_argument("local_solve: hybrid vector size mismatch");
  const Eigen::MatrixXd K = local_matrix(b);
  Eigen::VectorXd rhs = rhs_vector(b);
  if (b.n_hat > 0) rhs += hat_matrix(b) * uhat_e;
  rhs(rhs.size() - 1) += rho_e;
  LuSolveReport report;
  const Eigen::VectorXd x = lu_factor_solve(K, rhs, &report);
  LocalSolution s = split_solution(x, b.nen, 3);
  s.residual = report.relative_residual;
  return s;
}

CondensedElement condense(const LocalBlocks& b) {
  CondensedElement c;
  c.elem = b.elem;
  c.n_hat = b.n_hat;
  c.hat_global_faces = b.hat_global_faces;
  c.hat_offsets = b.hat_offsets;
  c.boundary_measure = b.boundary_measure;

  const Eigen::MatrixXd K = local_matrix(b);
  const int n = static_cast<int>(K.rows());
  Eigen::MatrixXd rhs(n, b.n_hat + 2);
  rhs.leftCols(b.n_hat) = hat_matrix(b);
  rhs.col(b.n_hat) = rhs_vector(b);
  rhs.col(b.n_hat + 1) = Eigen::VectorXd::Unit(n, n - 1);
  LuSolveReport report;
  const Eigen::MatrixXd X = lu_factor_solve(K, rhs, &report);
  if (report.relative_residual > 1e-9)
    throw std::runtime_error(
        "condense: ill-conditioned local system (check stabilization admissibility)");

  c.XA = X.leftCols(b.n_hat);
  c.Xf = X.col(b.n_hat);
  c.Xz = X.col(b.n_hat + 1);

  const int nL = 3 * b.nen, nu = 2 * b.nen, np = b.nen;
  Eigen::MatrixXd R(b.n_hat, n);  // [A_Lhat', A_hatu, A_phat', 0]
  R.setZero();
  R.leftCols(nL) = b.A_Lhat.transpose();
  R.middleCols(nL, nu) = b.A_hatu;
  R.middleCols(nL + nu, np) = b.A_phat.transpose();

  c.Khat = R * c.XA + b.A_hathat;
  c.H = R * c.Xz;
  c.fhat_u = b.f_hat - R * c.Xf;
  // Direct formula for the rho coupling, normalized to the boundary mean so
  // that it coincides with the inverse path H (see the structural checks).
  c.G = b.A_phat.transpose() * Eigen::VectorXd::Ones(np) / b.boundary_measure;
  c.fhat_rho = -b.f_p.sum() / b.boundary_measure;
  return c;
}

LocalSolution CondensedElement::recover(const Eigen::VectorXd& uhat_e, double rho_e, int nen,
                                        int msd) const {
  Eigen::VectorXd x = Xf + Xz * rho_e;
  if (n_hat > 0) x += XA * uhat_e;
  return split_solution(x, nen, msd);
}

}  // namespace hdgflow
