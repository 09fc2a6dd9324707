#include <doctest.h>

#include <cstdio>

#include "hdgflow/local_assembly.hpp"
#include "hdgflow/mesh.hpp"

using namespace hdgflow;

namespace {

std::vector<std::pair<FaceTag, BoundaryTagger>> wang_taggers() {
  return {{FaceTag::neumann, [](const Eigen::Vector2d& x) { return std::abs(x(1)) < 1e-12; }},
          {FaceTag::dirichlet, [](const Eigen::Vector2d& x) { return std::abs(x(1)) >= 1e-12; }}};
}

}  // namespace

TEST_CASE("2x2 triangular unit square") {
  const Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 1);
  CHECK(mesh.n_elements() == 8);
  CHECK(mesh.n_faces() == 16);
  CHECK(mesh.n_interior_faces() == 8);
  CHECK(mesh.n_boundary_faces() == 8);
  // handshake: element-face incidences = 2*interior + boundary
  int handshake = 0;
  for (const std::vector<ElementFaceRef>& refs : mesh.elem_faces)
    handshake += static_cast<int>(refs.size());
  CHECK(handshake == 24);
}

TEST_CASE("two-triangle unit square") {
  const Mesh mesh = structured_mesh({0, 0, 1, 1}, 1, 1, ElemType::simplex, 1);
  CHECK(mesh.n_elements() == 2);
  CHECK(mesh.n_interior_faces() == 1);
  CHECK(mesh.n_boundary_faces() == 4);
}

TEST_CASE("channel quad mesh dimensions") {
  const Mesh mesh = structured_mesh({0, 0, 10, 1}, 10, 10, ElemType::quad, 2);
  CHECK(mesh.n_elements() == 100);
  for (const std::vector<int>& conn : mesh.elems) CHECK(conn.size() == 9);
  CHECK(mesh.n_faces() == 2 * 10 * 9 + 40);
}

TEST_CASE("degenerate inputs rejected") {
  CHECK_THROWS_AS(structured_mesh({0, 0, 1, 1}, 0, 2, ElemType::simplex, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(structured_mesh({0, 0, 0, 1}, 2, 2, ElemType::quad, 1), std::invalid_argument);
}

TEST_CASE("face orientation and shared nodes") {
  const Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 3);
  const ReferenceElement re = reference_element(ElemType::simplex, 3);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const MeshFace& face = mesh.faces[f];
    if (face.right < 0) continue;
    // left traversal matches canonical order, right is reversed
    std::vector<int> left_nodes, right_nodes;
    for (int a : re.face_nodes[face.left_face]) left_nodes.push_back(mesh.elems[face.left][a]);
    for (int a : re.face_nodes[face.right_face]) right_nodes.push_back(mesh.elems[face.right][a]);
    CHECK(left_nodes == face.nodes);
    CHECK(mesh.elem_faces[face.left][face.left_face].reversed == false);
    CHECK(mesh.elem_faces[face.right][face.right_face].reversed == true);
    CHECK(right_nodes[0] == face.nodes[1]);
    CHECK(right_nodes[1] == face.nodes[0]);
  }
}

TEST_CASE("classify boundary: Wang layout and error paths") {
  Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 1);
  classify_boundary(mesh, wang_taggers());
  int neumann = 0, dirichlet = 0;
  for (const MeshFace& f : mesh.faces) {
    if (f.right >= 0) {
      CHECK(f.tag == FaceTag::interior);
      continue;
    }
    if (f.tag == FaceTag::neumann) {
      ++neumann;
      CHECK(mesh.face_midpoint(&f - mesh.faces.data())(1) == doctest::Approx(0.0));
    } else {
      ++dirichlet;
    }
  }
  CHECK(neumann == 2);
  CHECK(dirichlet == 6);
  CHECK_FALSE(mesh.pure_dirichlet());

  classify_all_dirichlet(mesh);
  CHECK(mesh.pure_dirichlet());

  CHECK_THROWS_AS(
      classify_boundary(mesh, {{FaceTag::neumann,
                                [](const Eigen::Vector2d& x) { return x(1) < 0.25; }}}),
      std::runtime_error);
  CHECK_THROWS_AS(
      classify_boundary(mesh,
                        {{FaceTag::neumann, [](const Eigen::Vector2d&) { return true; }},
                         {FaceTag::dirichlet, [](const Eigen::Vector2d&) { return true; }}}),
      std::runtime_error);
}

TEST_CASE("non-conforming connectivity detected") {
  Mesh mesh = structured_mesh({0, 0, 1, 1}, 1, 1, ElemType::simplex, 1);
  // a third element reusing an existing face makes the mesh non-conforming
  mesh.elems.push_back(mesh.elems[0]);
  CHECK_THROWS_AS(extract_skeleton(mesh), std::runtime_error);
}

TEST_CASE("closed-surface identity per element") {
  for (ElemType type : {ElemType::simplex, ElemType::quad}) {
    const int k = 2;
    const Mesh mesh = structured_mesh({0, 0, 2, 1}, 3, 2, type, k);
    const AssemblyTables tables = make_assembly_tables(type, k, 1.0);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      Eigen::Vector2d total = Eigen::Vector2d::Zero();
      for (int f = 0; f < tables.elem.nfaces; ++f) {
        const FaceQuadrature fq = element_face_quadrature(mesh, tables, e, f);
        for (Eigen::Index g = 0; g < fq.dS.size(); ++g)
          total += fq.normal.row(g).transpose() * fq.dS(g);
      }
      CHECK(total.cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("interior normals are antiparallel") {
  const Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 2);
  const AssemblyTables tables = make_assembly_tables(ElemType::simplex, 2, 1.0);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const MeshFace& face = mesh.faces[f];
    if (face.right < 0) continue;
    const FaceQuadrature left = element_face_quadrature(mesh, tables, face.left, face.left_face);
    const FaceQuadrature right =
        element_face_quadrature(mesh, tables, face.right, face.right_face);
    // same physical face, opposite traversal: compare at mirrored points
    const Eigen::Index nq = left.dS.size();
    for (Eigen::Index g = 0; g < nq; ++g) {
      CHECK((left.x.row(g) - right.x.row(nq - 1 - g)).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((left.normal.row(g) + right.normal.row(nq - 1 - g)).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }
}

TEST_CASE("mesh text format round trip") {
  Mesh mesh = structured_mesh({0, 0, 1, 1}, 2, 2, ElemType::simplex, 2);
  classify_boundary(mesh, wang_taggers());
  const std::string path = "roundtrip_mesh.txt";
  save_mesh_text(mesh, path);
  const Mesh loaded = load_mesh_text(path);
  CHECK(loaded.n_elements() == mesh.n_elements());
  CHECK(loaded.n_faces() == mesh.n_faces());
  CHECK((loaded.nodes - mesh.nodes).cwiseAbs().maxCoeff() == 0.0);
  int neumann = 0;
  for (const MeshFace& f : loaded.faces)
    if (f.tag == FaceTag::neumann) ++neumann;
  CHECK(neumann == 2);
  std::remove(path.c_str());
}
