#include "hdgflow/postprocess.hpp"

#include <cmath>
#include <stdexcept>

#include "hdgflow/dense_linalg.hpp"
#include "hdgflow/voigt.hpp"

namespace hdgflow {

PostprocessedField postprocess_velocity(const Solution& sol, const Mesh& mesh,
                                        const ProblemData& data) {
  const int k = mesh.degree;
  const ReferenceElement re_k = reference_element(mesh.elem_type, k);
  const ReferenceElement re_s = reference_element(mesh.elem_type, k + 1);
  const AssemblyTables tk = make_assembly_tables(mesh.elem_type, k, data.nu);
  const ConstitutiveOperators ops = constitutive_operators(data.nu, 2);
  const VoigtDims vd = voigt_dims(2);

  // degree-k basis evaluated at the star quadrature points
  const Eigen::MatrixXd Nk = re_k.eval(re_s.quad.points);
  const int nqs = static_cast<int>(re_s.quad.weights.size());
  const int nen_s = re_s.nen;
  const int nen_k = re_k.nen;
  const int nfn = tk.face.nen;
  const int nqf = static_cast<int>(tk.face_quad.weights.size());
  const int nsys = 2 * nen_s + 2 + vd.nrr;

  PostprocessedField out;
  out.degree = k + 1;
  out.u_star.assign(mesh.n_elements(), Eigen::VectorXd());

  for (int e = 0; e < mesh.n_elements(); ++e) {
    // geometry of the same physical element under the star basis
    Eigen::MatrixXd coords_s(nen_s, 2);
    {
      const MappedGeometry at_nodes =
          map_element(mesh.element_coords(e), re_k, re_s.nodes);
      coords_s = at_nodes.x;
    }
    const MappedGeometry geo = map_element_tabulated(coords_s, re_s.N, re_s.dN);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nsys, nsys);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nsys);

    for (int g = 0; g < nqs; ++g) {
      const double dV = geo.detJ(g) * re_s.quad.weights(g);
      const Eigen::MatrixXd& dNs = geo.grad[g];

      Eigen::Vector3d Lg = Eigen::Vector3d::Zero();
      Eigen::Vector2d ug = Eigen::Vector2d::Zero();
      for (int j = 0; j < nen_k; ++j) {
        Lg += Nk(g, j) * sol.L[e].segment<3>(3 * j);
        ug += Nk(g, j) * sol.u[e].segment<2>(2 * j);
      }

      std::vector<Eigen::MatrixXd> B(nen_s);
      for (int j = 0; j < nen_s; ++j)
        B[j] = dNs(j, 0) * ops.F[0] + dNs(j, 1) * ops.F[1];  // msd x 2

      for (int j = 0; j < nen_s; ++j) {
        for (int l = 0; l < nen_s; ++l) {
          const Eigen::Matrix2d blk = B[j].transpose() * (ops.Dhalf * B[l]) * dV;
          M.block<2, 2>(2 * j, 2 * l) += blk;
        }
        rhs.segment<2>(2 * j) -= (B[j].transpose() * Lg) * dV;

        // mean rows and curl row (Lagrange constraints)
        const double Ns = re_s.N(g, j);
        M(2 * nen_s + 0, 2 * j + 0) += Ns * dV;
        M(2 * nen_s + 1, 2 * j + 1) += Ns * dV;
        M(2 * nen_s + 2, 2 * j + 0) += -dNs(j, 1) * dV;
        M(2 * nen_s + 2, 2 * j + 1) += dNs(j, 0) * dV;
      }
      rhs(2 * nen_s + 0) += ug(0) * dV;
      rhs(2 * nen_s + 1) += ug(1) * dV;
    }
    M.block(0, 2 * nen_s, 2 * nen_s, 2 + vd.nrr) =
        M.block(2 * nen_s, 0, 2 + vd.nrr, 2 * nen_s).transpose();

    // curl right-hand side: tangential boundary data
    double curl_rhs = 0.0;
    for (int f = 0; f < tk.elem.nfaces; ++f) {
      const ElementFaceRef ref = mesh.elem_faces[e][f];
      const bool dirichlet = mesh.faces[ref.face].tag == FaceTag::dirichlet;
      const FaceQuadrature fg = element_face_quadrature(mesh, tk, e, f);
      std::vector<int> col(nfn);
      for (int i = 0; i < nfn; ++i) col[i] = ref.reversed ? tk.reversal[i] : i;
      for (int g = 0; g < nqf; ++g) {
        const Eigen::Vector2d n = fg.normal.row(g).transpose();
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        if (dirichlet) {
          if (data.dirichlet) v = data.dirichlet(fg.x.row(g).transpose());
        } else {
          for (int i = 0; i < nfn; ++i)
            v += tk.face_N(g, i) * sol.uhat[ref.face].segment<2>(2 * col[i]);
        }
        curl_rhs += (-n(1) * v(0) + n(0) * v(1)) * fg.dS(g);
      }
    }
    rhs(2 * nen_s + 2) = curl_rhs;

    LuSolveReport rep;
    const Eigen::VectorXd x = lu_factor_solve(M, rhs, &rep);
    if (rep.relative_residual > 1e-9)
      throw std::runtime_error("postprocess_velocity: singular augmented system");
    out.u_star[e] = x.head(2 * nen_s);

    // constraint residuals
    Eigen::Vector2d mean_h = Eigen::Vector2d::Zero(), mean_k = Eigen::Vector2d::Zero();
    double curl_h = 0.0;
    for (int g = 0; g < nqs; ++g) {
      const double dV = geo.detJ(g) * re_s.quad.weights(g);
      const Eigen::MatrixXd& dNs = geo.grad[g];
      for (int j = 0; j < nen_s; ++j) {
        mean_h += re_s.N(g, j) * out.u_star[e].segment<2>(2 * j) * dV;
        curl_h += (-dNs(j, 1) * out.u_star[e](2 * j) + dNs(j, 0) * out.u_star[e](2 * j + 1)) * dV;
      }
      for (int j = 0; j < nen_k; ++j) mean_k += Nk(g, j) * sol.u[e].segment<2>(2 * j) * dV;
    }
    out.max_mean_residual =
        std::max(out.max_mean_residual, (mean_h - mean_k).cwiseAbs().maxCoeff());
    out.max_curl_residual = std::max(out.max_curl_residual, std::abs(curl_h - curl_rhs));
  }
  return out;
}

}  // namespace hdgflow
