// Elemental matrices of the HDG-Voigt formulation, the local saddle system
// with the boundary-pressure constraint, and its static condensation.
//
// Local unknown ordering: L (node-major, Voigt-minor), u (node-major,
// component-minor), p (nodal), then the scalar multiplier zeta enforcing
// <p,1> over the element boundary. Hybrid columns are grouped per
// non-Dirichlet face in local face order, nodes in the face's canonical
// order, components minor.

#ifndef HDGFLOW_LOCAL_ASSEMBLY_HPP
#define HDGFLOW_LOCAL_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <vector>

#include "hdgflow/mesh.hpp"
#include "hdgflow/problem.hpp"
#include "hdgflow/voigt.hpp"

namespace hdgflow {

/// Geometry-independent tabulations shared by all elements of a mesh.
struct AssemblyTables {
  ReferenceElement elem;
  ReferenceElement face;                   ///< segment element of the same degree
  QuadratureRule face_quad;                ///< exactness 2k+2 on [-1,1]
  Eigen::MatrixXd face_N;                  ///< face basis at face quad points
  std::vector<Eigen::MatrixXd> elem_N_face;             ///< per local face: element basis there
  std::vector<std::vector<Eigen::MatrixXd>> elem_dN_face;  ///< per local face: reference gradients
  std::vector<int> reversal;               ///< face-node permutation for flipped traversal
  VoigtDims vd;
  ConstitutiveOperators ops;
  std::vector<Eigen::MatrixXd> DhalfF;     ///< Dhalf * F_k, msd x nsd
};

AssemblyTables make_assembly_tables(ElemType elem_type, int k, double nu);

/// Physical quadrature data on local face f of element e: points, outward
/// unit normals and arc-length weights.
struct FaceQuadrature {
  Eigen::MatrixXd x;
  Eigen::MatrixXd normal;
  Eigen::VectorXd dS;
};

FaceQuadrature element_face_quadrature(const Mesh& mesh, const AssemblyTables& tables, int e,
                                       int f);

/// Appendix-style elemental blocks. Signs follow the local system
///   [A_LL  A_Lu   0     0  ] [L]   [f_L]   [A_Lhat]         [0]
///   [A_Lu' A_uu   A_pu' 0  ] [u] = [f_u] + [A_uhat] uhat +  [0] rho
///   [0     A_pu   0     arp] [p]   [f_p]   [A_phat]         [0]
///   [0     0      arp'  0  ] [z]   [ 0 ]   [  0   ]         [1]
struct LocalBlocks {
  int elem = -1;
  int nen = 0, nfn = 0, n_hat = 0;
  Eigen::MatrixXd A_LL, A_Lu, A_Lhat, A_uu, A_uhat, A_pu, A_phat;
  Eigen::MatrixXd A_hatu, A_hathat;  ///< global transmission couplings (rows = hat dofs)
  Eigen::VectorXd a_rhop, f_L, f_u, f_p, f_hat;
  double boundary_measure = 0.0;
  std::vector<int> hat_faces;         ///< local face indices carrying hybrid dofs
  std::vector<int> hat_global_faces;  ///< matching global face ids
  std::vector<int> hat_offsets;       ///< column offset of each hat face block
};

struct LocalAssemblyContext {
  const Mesh* mesh = nullptr;
  const AssemblyTables* tables = nullptr;
  const ProblemData* data = nullptr;
  ConvectionField conv;
  TauPolicy tau;
  bool newton = false;  ///< include the Navier-Stokes linearization terms
  /// Outflow-tagged faces keep the convective flux in their transmission rows
  /// (homogeneous-Neumann handling); otherwise only the stress part is used.
  bool outflow_as_neumann = false;
};

LocalBlocks assemble_local_blocks(const LocalAssemblyContext& ctx, int e);

/// Dimension (msd + nsd + 1) * nen + 1 of the local system.
int local_system_dimension(ElemType elem_type, int nsd, int k);

/// Assemble the full local matrix of `blocks` (including the zeta row/column).
Eigen::MatrixXd local_matrix(const LocalBlocks& blocks);

struct LocalSolution {
  Eigen::VectorXd L, u, p;
  double zeta = 0.0;
  double residual = 0.0;  ///< relative residual of the local linear system
};

/// Solve the local problem for given hybrid trace values and rho.
LocalSolution local_solve(const LocalBlocks& blocks, const Eigen::VectorXd& uhat_e, double rho_e);

/// Statically condensed element: contribution to the global saddle system and
/// the stored back-substitution operator.
struct CondensedElement {
  int elem = -1;
  Eigen::MatrixXd Khat;   ///< n_hat x n_hat
  Eigen::VectorXd G;      ///< rho coupling, direct quadrature formula (scaled)
  Eigen::VectorXd H;      ///< rho coupling through the local inverse; must equal G
  Eigen::VectorXd fhat_u;
  double fhat_rho = 0.0;
  double boundary_measure = 0.0;
  std::vector<int> hat_global_faces;
  std::vector<int> hat_offsets;
  int n_hat = 0;

  // x = Xf + XA * uhat_e + Xz * rho_e with x = (L, u, p, zeta)
  Eigen::MatrixXd XA;
  Eigen::VectorXd Xf, Xz;

  LocalSolution recover(const Eigen::VectorXd& uhat_e, double rho_e, int nen, int msd) const;
};

CondensedElement condense(const LocalBlocks& blocks);

}  // namespace hdgflow

#endif
