#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgnewton/fem.hpp"
#include "dgnewton/mesh.hpp"

namespace dgn
{

// Field attached to mesh points or cells. components is 1 (SCALARS) or
// 2/3 (VECTORS, third component padded with zero); data is laid out
// entity-major.
struct VtkField
{
   std::string name;
   int components = 1;
   std::vector<double> data;
};

// Legacy ASCII unstructured-grid file (triangles, type 5, or tets, type
// 10). Point data covers mesh vertices, cell data covers cells.
void write_vtk(std::ostream &out, const Mesh &mesh,
               const std::vector<VtkField> &point_data = {},
               const std::vector<VtkField> &cell_data = {});

// Same grid, but every cell gets its own copy of its vertices, so
// discontinuous nodal fields survive: (dim + 1) * num_cells points, fields
// given as DG coefficient vectors.
struct DgField
{
   std::string name;
   Eigen::VectorXd values;
};
void write_vtk_exploded(std::ostream &out, const FunctionSpace &dg_space,
                        const std::vector<DgField> &fields);

// Per-cell averages of a DG field, value_dim components per cell, ready
// for use as VTK cell data.
VtkField cell_average(const FunctionSpace &dg_space, const Eigen::VectorXd &u,
                      const std::string &name);

// Writes `text` to `path`, creating parent directories. Throws
// std::runtime_error when the file cannot be written.
void write_text_file(const std::string &path, const std::string &text);

} // namespace dgn
