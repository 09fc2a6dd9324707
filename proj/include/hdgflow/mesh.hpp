// Structured 2D meshes, internal-skeleton extraction with a canonical face
// orientation, and boundary classification.

#ifndef HDGFLOW_MESH_HPP
#define HDGFLOW_MESH_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hdgflow/refelem.hpp"

namespace hdgflow {

enum class FaceTag { interior, dirichlet, neumann, outflow };

std::string face_tag_name(FaceTag tag);

struct MeshFace {
  std::vector<int> nodes;  ///< geometric node ids, canonical (owner) traversal, corners first
  int left = -1;           ///< owner element (lower index); orientation reference
  int left_face = -1;
  int right = -1;          ///< second element, -1 on the boundary
  int right_face = -1;
  FaceTag tag = FaceTag::interior;
};

struct ElementFaceRef {
  int face = -1;
  bool reversed = false;  ///< element traversal opposite to canonical order
};

struct Rect {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

struct Mesh {
  ElemType elem_type = ElemType::simplex;
  int degree = 1;
  Eigen::MatrixXd nodes;                             ///< n_nodes x 2
  std::vector<std::vector<int>> elems;               ///< nen node ids per element
  std::vector<MeshFace> faces;
  std::vector<std::vector<ElementFaceRef>> elem_faces;

  int n_elements() const { return static_cast<int>(elems.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }
  int n_boundary_faces() const;
  int n_interior_faces() const;
  Eigen::MatrixXd element_coords(int e) const;
  Eigen::Vector2d face_midpoint(int f) const;
  /// True when no boundary face carries a Neumann or outflow tag.
  bool pure_dirichlet() const;
};

/// Uniform mesh of an axis-aligned rectangle; triangles split each cell along
/// the main diagonal. High-order nodes are placed on the equispaced lattice.
Mesh structured_mesh(const Rect& domain, int nx, int ny, ElemType elem_type, int k);

/// Rebuild face list and element-face references from element connectivity.
/// Throws on non-conforming connectivity (a face shared by more than two
/// elements). Interior faces are owned by the lower adjacent element index.
void extract_skeleton(Mesh& mesh);

using BoundaryTagger = std::function<bool(const Eigen::Vector2d&)>;

/// Assign a boundary tag to every boundary face; predicates are evaluated at
/// face midpoints and must cover the boundary disjointly.
void classify_boundary(Mesh& mesh,
                       const std::vector<std::pair<FaceTag, BoundaryTagger>>& taggers);

/// Convenience: tag the whole boundary Dirichlet.
void classify_all_dirichlet(Mesh& mesh);

// Plain-text mesh format with NODES / ELEMENTS / BOUNDARY sections.
void save_mesh_text(const Mesh& mesh, const std::string& path);
Mesh load_mesh_text(const std::string& path);

}  // namespace hdgflow

#endif
