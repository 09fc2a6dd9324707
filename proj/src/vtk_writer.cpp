#include "hdgflow/vtk_writer.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace hdgflow {

namespace {

// lattice index map and linear subdivision of the reference node layout
struct Subdivision {
  std::vector<std::vector<int>> cells;  ///< local node ids per linear cell
  int vtk_type = 5;
};

Subdivision subdivide(const ReferenceElement& re) {
  Subdivision sub;
  const int k = re.degree;
  if (re.type == ElemType::simplex) {
    sub.vtk_type = 5;  // VTK_TRIANGLE
    std::vector<std::vector<int>> id(k + 1, std::vector<int>(k + 1, -1));
    for (int a = 0; a < re.nen; ++a) {
      const int i = static_cast<int>(std::lround(re.nodes(a, 0) * k));
      const int j = static_cast<int>(std::lround(re.nodes(a, 1) * k));
      id[i][j] = a;
    }
    for (int j = 0; j < k; ++j)
      for (int i = 0; i + j < k; ++i) {
        sub.cells.push_back({id[i][j], id[i + 1][j], id[i][j + 1]});
        if (i + j < k - 1)
          sub.cells.push_back({id[i + 1][j], id[i + 1][j + 1], id[i][j + 1]});
      }
  } else {
    sub.vtk_type = 9;  // VTK_QUAD
    std::vector<std::vector<int>> id(k + 1, std::vector<int>(k + 1, -1));
    for (int a = 0; a < re.nen; ++a) {
      const int i = static_cast<int>(std::lround((re.nodes(a, 0) + 1.0) * k / 2.0));
      const int j = static_cast<int>(std::lround((re.nodes(a, 1) + 1.0) * k / 2.0));
      id[i][j] = a;
    }
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i)
        sub.cells.push_back({id[i][j], id[i + 1][j], id[i + 1][j + 1], id[i][j + 1]});
  }
  return sub;
}

}  // namespace

void write_vtk_fields(const std::string& path, const Mesh& mesh, const Solution& sol,
                      const PostprocessedField* star) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk_fields: cannot open " + path);
  const ReferenceElement re = reference_element(mesh.elem_type, mesh.degree);
  const Subdivision sub = subdivide(re);
  const int nel = mesh.n_elements();
  const long npts = static_cast<long>(nel) * re.nen;

  // u_star sampled at the degree-k element nodes
  Eigen::MatrixXd Ns;
  if (star) {
    const ReferenceElement re_s = reference_element(mesh.elem_type, star->degree);
    Ns = re_s.eval(re.nodes);
  }

  out.precision(12);
  out << "# vtk DataFile Version 3.0\n";
  out << "hdgflow fields\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << npts << " double\n";
  for (int e = 0; e < nel; ++e) {
    const Eigen::MatrixXd coords = mesh.element_coords(e);
    for (int a = 0; a < re.nen; ++a)
      out << coords(a, 0) << " " << coords(a, 1) << " 0\n";
  }

  const long ncells = static_cast<long>(nel) * sub.cells.size();
  const int cn = sub.vtk_type == 5 ? 3 : 4;
  out << "CELLS " << ncells << " " << ncells * (cn + 1) << "\n";
  for (int e = 0; e < nel; ++e)
    for (const std::vector<int>& cell : sub.cells) {
      out << cn;
      for (int a : cell) out << " " << (static_cast<long>(e) * re.nen + a);
      out << "\n";
    }
  out << "CELL_TYPES " << ncells << "\n";
  for (long i = 0; i < ncells; ++i) out << sub.vtk_type << "\n";

  out << "POINT_DATA " << npts << "\n";
  out << "VECTORS u double\n";
  for (int e = 0; e < nel; ++e)
    for (int a = 0; a < re.nen; ++a)
      out << sol.u[e](2 * a) << " " << sol.u[e](2 * a + 1) << " 0\n";
  if (star) {
    out << "VECTORS u_star double\n";
    for (int e = 0; e < nel; ++e)
      for (int a = 0; a < re.nen; ++a) {
        Eigen::Vector2d us = Eigen::Vector2d::Zero();
        for (Eigen::Index j = 0; 2 * j < star->u_star[e].size(); ++j)
          us += Ns(a, j) * star->u_star[e].segment<2>(2 * j);
        out << us(0) << " " << us(1) << " 0\n";
      }
  }
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < nel; ++e)
    for (int a = 0; a < re.nen; ++a) out << sol.p[e](a) << "\n";
  const char* names[3] = {"L_11", "L_22", "L_12"};
  for (int m = 0; m < 3; ++m) {
    out << "SCALARS " << names[m] << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < nel; ++e)
      for (int a = 0; a < re.nen; ++a) out << sol.L[e](3 * a + m) << "\n";
  }
}

}  // namespace hdgflow
