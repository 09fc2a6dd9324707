// Legacy ASCII VTK (UNSTRUCTURED_GRID) export of the discontinuous fields.
// Each element contributes its own points; high-order elements are
// subdivided into linear cells on the nodal lattice.

#ifndef HDGFLOW_VTK_WRITER_HPP
#define HDGFLOW_VTK_WRITER_HPP

#include <string>

#include "hdgflow/global_system.hpp"
#include "hdgflow/mesh.hpp"
#include "hdgflow/postprocess.hpp"

namespace hdgflow {

/// Point data: vectors u and u_star (when given), scalars p, L_11, L_22, L_12.
void write_vtk_fields(const std::string& path, const Mesh& mesh, const Solution& sol,
                      const PostprocessedField* star = nullptr);

}  // namespace hdgflow

#endif
