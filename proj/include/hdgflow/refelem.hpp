// Reference elements: nodal Lagrange bases on triangles, quadrilaterals and
// segments, Gauss quadrature, and the isoparametric mapping.
//
// Reference domains: unit right triangle {xi,eta >= 0, xi+eta <= 1},
// quadrilateral [-1,1]^2, segment [-1,1].
//
// Node ordering: corners first, then the interior nodes of each edge in edge
// order (edge e runs from corner e to corner e+1), then element-interior
// nodes in lexicographic order. Segment nodes: both endpoints, then interior
// nodes from the first endpoint towards the second.

#ifndef HDGFLOW_REFELEM_HPP
#define HDGFLOW_REFELEM_HPP

#include <Eigen/Dense>
#include <vector>

namespace hdgflow {

enum class ElemType { simplex, quad, segment };

struct QuadratureRule {
  Eigen::MatrixXd points;   ///< nq x dim
  Eigen::VectorXd weights;  ///< nq
};

/// Rule integrating polynomials up to `exactness` exactly on the reference
/// domain. Triangles use a Duffy-collapsed tensor Gauss rule.
QuadratureRule quadrature_rule(ElemType domain, int exactness);

/// Gauss-Legendre rule on [-1,1] with n points.
QuadratureRule gauss_legendre(int n);

struct ReferenceElement {
  ElemType type = ElemType::segment;
  int degree = 0;
  int nsd = 0;  ///< intrinsic dimension (1 for segment, 2 otherwise)
  int nen = 0;

  Eigen::MatrixXd nodes;  ///< nen x nsd reference coordinates

  QuadratureRule quad;                ///< volume rule, exactness 2*degree+2
  Eigen::MatrixXd N;                  ///< nq x nen basis values at quad points
  std::vector<Eigen::MatrixXd> dN;    ///< nsd matrices (nq x nen) of reference derivatives

  int nfaces = 0;
  int nfn = 0;                             ///< nodes per face (degree+1 in 2D)
  std::vector<std::vector<int>> face_nodes;  ///< local node ids per face, corner-to-corner

  /// Basis values at arbitrary reference points (npts x nen).
  Eigen::MatrixXd eval(const Eigen::MatrixXd& pts) const;
  /// Reference-gradient tables at arbitrary points; nsd matrices of npts x nen.
  std::vector<Eigen::MatrixXd> eval_grad(const Eigen::MatrixXd& pts) const;

  /// Reference coordinates of face quadrature/lattice points.
  /// `s` holds 1D coordinates in [-1,1] along the face (corner f -> corner f+1).
  Eigen::MatrixXd face_point_coords(int face, const Eigen::VectorXd& s) const;

  /// Permutation p with N_i(-s) = N_{p(i)}(s); used to flip face traversal.
  static std::vector<int> segment_reversal(int degree);

  // Monomial representation N_j = sum_t coeff(t, j) * m_t.
  Eigen::MatrixXd coeff;
  Eigen::MatrixXi powers;  ///< nterms x nsd exponents
};

ReferenceElement reference_element(ElemType type, int k);

/// Geometry of an element mapped to physical space, evaluated at a set of
/// reference points.
struct MappedGeometry {
  Eigen::MatrixXd x;                   ///< npts x nsd physical coordinates
  std::vector<Eigen::MatrixXd> J;      ///< per point, nsd x nsd, J(i,j) = dx_i/dxi_j
  Eigen::VectorXd detJ;
  std::vector<Eigen::MatrixXd> grad;   ///< per point, nen x nsd physical gradients
};

/// Map an element with nodal coordinates `coords` (nen x nsd). Throws
/// std::runtime_error if detJ <= 0 at any point (inverted/degenerate element).
MappedGeometry map_element(const Eigen::MatrixXd& coords, const ReferenceElement& re,
                           const Eigen::MatrixXd& ref_pts);

/// Same with pretabulated basis values/gradients at the points.
MappedGeometry map_element_tabulated(const Eigen::MatrixXd& coords, const Eigen::MatrixXd& N,
                                     const std::vector<Eigen::MatrixXd>& dN);

/// Uniform sampling lattice on the reference domain with n points per
/// direction (triangle: barycentric lattice).
Eigen::MatrixXd reference_lattice(ElemType type, int n);

}  // namespace hdgflow

#endif
