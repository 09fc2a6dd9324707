#include "hdgflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hdgflow {

std::string face_tag_name(FaceTag tag) {
  switch (tag) {
    case FaceTag::interior: return "interior";
    case FaceTag::dirichlet: return "dirichlet";
    case FaceTag::neumann: return "neumann";
    case FaceTag::outflow: return "outflow";
  }
  return "?";
}

int Mesh::n_boundary_faces() const {
  int n = 0;
  for (const MeshFace& f : faces)
    if (f.right < 0) ++n;
  return n;
}

int Mesh::n_interior_faces() const { return n_faces() - n_boundary_faces(); }

Eigen::MatrixXd Mesh::element_coords(int e) const {
  const std::vector<int>& ids = elems.at(e);
  Eigen::MatrixXd coords(ids.size(), 2);
  for (size_t a = 0; a < ids.size(); ++a) coords.row(static_cast<Eigen::Index>(a)) = nodes.row(ids[a]);
  return coords;
}

Eigen::Vector2d Mesh::face_midpoint(int f) const {
  const MeshFace& face = faces.at(f);
  return 0.5 * (nodes.row(face.nodes[0]) + nodes.row(face.nodes[1])).transpose();
}

bool Mesh::pure_dirichlet() const {
  for (const MeshFace& f : faces)
    if (f.right < 0 && f.tag != FaceTag::dirichlet) return false;
  return true;
}

Mesh structured_mesh(const Rect& domain, int nx, int ny, ElemType elem_type, int k) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("structured_mesh: nx, ny >= 1 required");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0))
    throw std::invalid_argument("structured_mesh: degenerate rectangle");
  if (elem_type == ElemType::segment)
    throw std::invalid_argument("structured_mesh: element type must be simplex or quad");

  const ReferenceElement re = reference_element(elem_type, k);

  Mesh mesh;
  mesh.elem_type = elem_type;
  mesh.degree = k;

  const int mx = nx * k + 1;
  const int my = ny * k + 1;
  mesh.nodes.resize(static_cast<Eigen::Index>(mx) * my, 2);
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) {
      mesh.nodes(static_cast<Eigen::Index>(j) * mx + i, 0) =
          domain.x0 + (domain.x1 - domain.x0) * i / (mx - 1);
      mesh.nodes(static_cast<Eigen::Index>(j) * mx + i, 1) =
          domain.y0 + (domain.y1 - domain.y0) * j / (my - 1);
    }
  auto lat = [mx](int i, int j) { return j * mx + i; };

  for (int cj = 0; cj < ny; ++cj)
    for (int ci = 0; ci < nx; ++ci) {
      const int i0 = ci * k, j0 = cj * k;
      if (elem_type == ElemType::quad) {
        std::vector<int> ids(re.nen);
        for (int a = 0; a < re.nen; ++a) {
          const int di = static_cast<int>(std::lround((re.nodes(a, 0) + 1.0) / 2.0 * k));
          const int dj = static_cast<int>(std::lround((re.nodes(a, 1) + 1.0) / 2.0 * k));
          ids[a] = lat(i0 + di, j0 + dj);
        }
        mesh.elems.push_back(std::move(ids));
      } else {
        // Lower triangle (a, b, c) and upper triangle (a, c, d) across the
        // main diagonal of the cell a=(ci,cj), b=(ci+1,cj), c=(ci+1,cj+1),
        // d=(ci,cj+1); both counterclockwise.
        std::vector<int> lower(re.nen), upper(re.nen);
        for (int a = 0; a < re.nen; ++a) {
          const int xi = static_cast<int>(std::lround(re.nodes(a, 0) * k));
          const int eta = static_cast<int>(std::lround(re.nodes(a, 1) * k));
          lower[a] = lat(i0 + xi + eta, j0 + eta);
          upper[a] = lat(i0 + xi, j0 + xi + eta);
        }
        mesh.elems.push_back(std::move(lower));
        mesh.elems.push_back(std::move(upper));
      }
    }

  extract_skeleton(mesh);
  return mesh;
}

void extract_skeleton(Mesh& mesh) {
  const ReferenceElement re = reference_element(mesh.elem_type, mesh.degree);
  mesh.faces.clear();
  mesh.elem_faces.assign(mesh.elems.size(), {});

  std::map<std::pair<int, int>, int> face_of;  // sorted corner pair -> face id
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const std::vector<int>& conn = mesh.elems[e];
    if (static_cast<int>(conn.size()) != re.nen)
      throw std::runtime_error("extract_skeleton: element node count mismatch");
    mesh.elem_faces[e].resize(re.nfaces);
    for (int f = 0; f < re.nfaces; ++f) {
      std::vector<int> fnodes;
      for (int a : re.face_nodes[f]) fnodes.push_back(conn[a]);
      const std::pair<int, int> key{std::min(fnodes[0], fnodes[1]),
                                    std::max(fnodes[0], fnodes[1])};
      auto it = face_of.find(key);
      if (it == face_of.end()) {
        MeshFace face;
        face.nodes = fnodes;
        face.left = e;
        face.left_face = f;
        face_of.emplace(key, mesh.n_faces());
        mesh.elem_faces[e][f] = {mesh.n_faces(), false};
        mesh.faces.push_back(std::move(face));
      } else {
        MeshFace& face = mesh.faces[it->second];
        if (face.right >= 0)
          throw std::runtime_error("extract_skeleton: non-conforming connectivity (face shared by >2 elements)");
        face.right = e;
        face.right_face = f;
        const bool reversed = (fnodes[0] != face.nodes[0]);
        if (reversed && fnodes[0] != face.nodes[1])
          throw std::runtime_error("extract_skeleton: inconsistent face node sets");
        mesh.elem_faces[e][f] = {it->second, reversed};
      }
    }
  }
}

void classify_boundary(Mesh& mesh,
                       const std::vector<std::pair<FaceTag, BoundaryTagger>>& taggers) {
  for (int f = 0; f < mesh.n_faces(); ++f) {
    MeshFace& face = mesh.faces[f];
    if (face.right >= 0) {
      face.tag = FaceTag::interior;
      continue;
    }
    const Eigen::Vector2d mid = mesh.face_midpoint(f);
    int hits = 0;
    FaceTag chosen = FaceTag::dirichlet;
    for (const auto& [tag, pred] : taggers) {
      if (tag == FaceTag::interior)
        throw std::invalid_argument("classify_boundary: interior is not a boundary tag");
      if (pred(mid)) {
        ++hits;
        chosen = tag;
      }
    }
    if (hits == 0)
      throw std::runtime_error("classify_boundary: uncovered boundary face");
    if (hits > 1)
      throw std::runtime_error("classify_boundary: boundary face covered by multiple taggers");
    face.tag = chosen;
  }
}

void classify_all_dirichlet(Mesh& mesh) {
  classify_boundary(mesh, {{FaceTag::dirichlet, [](const Eigen::Vector2d&) { return true; }}});
}

void save_mesh_text(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh_text: cannot open " + path);
  out.precision(17);
  out << "ELEMTYPE " << (mesh.elem_type == ElemType::simplex ? "tri" : "quad") << "\n";
  out << "DEGREE " << mesh.degree << "\n";
  out << "NODES " << mesh.nodes.rows() << "\n";
  for (Eigen::Index i = 0; i < mesh.nodes.rows(); ++i)
    out << mesh.nodes(i, 0) << " " << mesh.nodes(i, 1) << "\n";
  out << "ELEMENTS " << mesh.n_elements() << "\n";
  for (const std::vector<int>& conn : mesh.elems) {
    for (size_t a = 0; a < conn.size(); ++a) out << (a ? " " : "") << conn[a];
    out << "\n";
  }
  std::vector<int> bnd;
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (mesh.faces[f].right < 0) bnd.push_back(f);
  out << "BOUNDARY " << bnd.size() << "\n";
  for (int f : bnd) {
    out << face_tag_name(mesh.faces[f].tag);
    for (int id : mesh.faces[f].nodes) out << " " << id;
    out << "\n";
  }
  out << "END\n";
}

Mesh load_mesh_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh_text: cannot open " + path);
  Mesh mesh;
  std::string kw, val;
  in >> kw >> val;
  if (kw != "ELEMTYPE") throw std::runtime_error("load_mesh_text: expected ELEMTYPE");
  if (val == "tri")
    mesh.elem_type = ElemType::simplex;
  else if (val == "quad")
    mesh.elem_type = ElemType::quad;
  else
    throw std::runtime_error("load_mesh_text: unknown element type " + val);
  in >> kw >> mesh.degree;
  if (kw != "DEGREE" || mesh.degree < 1) throw std::runtime_error("load_mesh_text: bad DEGREE");
  long n = 0;
  in >> kw >> n;
  if (kw != "NODES" || n <= 0) throw std::runtime_error("load_mesh_text: bad NODES");
  mesh.nodes.resize(n, 2);
  for (long i = 0; i < n; ++i) in >> mesh.nodes(i, 0) >> mesh.nodes(i, 1);
  long m = 0;
  in >> kw >> m;
  if (kw != "ELEMENTS" || m <= 0) throw std::runtime_error("load_mesh_text: bad ELEMENTS");
  const ReferenceElement re = reference_element(mesh.elem_type, mesh.degree);
  mesh.elems.assign(m, std::vector<int>(re.nen));
  for (long e = 0; e < m; ++e)
    for (int a = 0; a < re.nen; ++a) in >> mesh.elems[e][a];
  if (!in) throw std::runtime_error("load_mesh_text: truncated file");
  extract_skeleton(mesh);

  long b = 0;
  in >> kw >> b;
  if (kw != "BOUNDARY" || b < 0) throw std::runtime_error("load_mesh_text: bad BOUNDARY");
  std::map<std::pair<int, int>, int> bface;
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (mesh.faces[f].right < 0)
      bface[{std::min(mesh.faces[f].nodes[0], mesh.faces[f].nodes[1]),
             std::max(mesh.faces[f].nodes[0], mesh.faces[f].nodes[1])}] = f;
  int tagged = 0;
  for (long i = 0; i < b; ++i) {
    std::string tag;
    in >> tag;
    std::vector<int> ids(re.nfn > 0 ? re.nfn : mesh.degree + 1);
    for (int& id : ids) in >> id;
    auto it = bface.find({std::min(ids[0], ids[1]), std::max(ids[0], ids[1])});
    if (it == bface.end())
      throw std::runtime_error("load_mesh_text: BOUNDARY entry is not a boundary face");
    FaceTag t;
    if (tag == "dirichlet")
      t = FaceTag::dirichlet;
    else if (tag == "neumann")
      t = FaceTag::neumann;
    else if (tag == "outflow")
      t = FaceTag::outflow;
    else
      throw std::runtime_error("load_mesh_text: unknown boundary tag " + tag);
    mesh.faces[it->second].tag = t;
    ++tagged;
  }
  if (tagged != static_cast<int>(bface.size()))
    throw std::runtime_error("load_mesh_text: not all boundary faces tagged");
  return mesh;
}

}  // namespace hdgflow
