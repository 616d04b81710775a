#include "dgnewton/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace dgn
{

namespace
{

std::string format_double(double v)
{
   char buf[32];
   auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
   return std::string(buf, ptr);
}

void write_header(std::ostream &out)
{
   out << "# vtk DataFile Version 3.0\n"
       << "dgnewton output\n"
       << "ASCII\n"
       << "DATASET UNSTRUCTURED_GRID\n";
}

void write_cells(std::ostream &out, const Mesh &mesh,
                 const std::vector<int> &connectivity)
{
   const int nn = mesh.nodes_per_cell();
   const int nc = mesh.num_cells();
   out << "CELLS " << nc << " " << nc * (nn + 1) << "\n";
   for (int c = 0; c < nc; ++c)
   {
      out << nn;
      for (int a = 0; a < nn; ++a)
      {
         out << " " << connectivity[c * nn + a];
      }
      out << "\n";
   }
   out << "CELL_TYPES " << nc << "\n";
   const int type = mesh.dim == 2 ? 5 : 10;
   for (int c = 0; c < nc; ++c)
   {
      out << type << "\n";
   }
}

void write_fields(std::ostream &out, const std::vector<VtkField> &fields,
                  int entities)
{
   for (const auto &field : fields)
   {
      if (static_cast<int>(field.data.size()) != entities * field.components)
      {
         throw std::invalid_argument("VTK field '" + field.name +
                                     "' has wrong size");
      }
      if (field.components == 1)
      {
         out << "SCALARS " << field.name << " double 1\n"
             << "LOOKUP_TABLE default\n";
         for (const double v : field.data)
         {
            out << format_double(v) << "\n";
         }
      }
      else if (field.components == 2 || field.components == 3)
      {
         out << "VECTORS " << field.name << " double\n";
         for (int e = 0; e < entities; ++e)
         {
            for (int k = 0; k < 3; ++k)
            {
               const double v = k < field.components
                                   ? field.data[e * field.components + k]
                                   : 0.0;
               out << (k ? " " : "") << format_double(v);
            }
            out << "\n";
         }
      }
      else
      {
         throw std::invalid_argument("VTK field '" + field.name +
                                     "' must have 1, 2 or 3 components");
      }
   }
}

void write_points(std::ostream &out, const std::vector<Eigen::Vector3d> &points)
{
   out << "POINTS " << points.size() << " double\n";
   for (const auto &p : points)
   {
      out << format_double(p.x()) << " " << format_double(p.y()) << " "
          << format_double(p.z()) << "\n";
   }
}

} // namespace

void write_vtk(std::ostream &out, const Mesh &mesh,
               const std::vector<VtkField> &point_data,
               const std::vector<VtkField> &cell_data)
{
   write_header(out);
   write_points(out, mesh.vertices);

   std::vector<int> connectivity;
   connectivity.reserve(mesh.num_cells() * mesh.nodes_per_cell());
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      for (int a = 0; a <= mesh.dim; ++a)
      {
         connectivity.push_back(mesh.cells[c][a]);
      }
   }
   write_cells(out, mesh, connectivity);

   if (!point_data.empty())
   {
      out << "POINT_DATA " << mesh.num_vertices() << "\n";
      write_fields(out, point_data, mesh.num_vertices());
   }
   if (!cell_data.empty())
   {
      out << "CELL_DATA " << mesh.num_cells() << "\n";
      write_fields(out, cell_data, mesh.num_cells());
   }
}

void write_vtk_exploded(std::ostream &out, const FunctionSpace &dg_space,
                        const std::vector<DgField> &fields)
{
   if (dg_space.kind() != SpaceKind::DG)
   {
      throw std::invalid_argument("write_vtk_exploded expects a DG space");
   }
   const Mesh &mesh = dg_space.mesh();
   const int nn = mesh.nodes_per_cell();

   write_header(out);
   std::vector<Eigen::Vector3d> points;
   std::vector<int> connectivity;
   points.reserve(mesh.num_cells() * nn);
   connectivity.reserve(mesh.num_cells() * nn);
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      for (int a = 0; a < nn; ++a)
      {
         connectivity.push_back(static_cast<int>(points.size()));
         points.push_back(mesh.vertices[mesh.cells[c][a]]);
      }
   }
   write_points(out, points);
   write_cells(out, mesh, connectivity);

   if (!fields.empty())
   {
      out << "POINT_DATA " << points.size() << "\n";
      std::vector<VtkField> point_fields;
      for (const auto &field : fields)
      {
         VtkField vf;
         vf.name = field.name;
         vf.components = dg_space.value_dim();
         if (field.values.size() != dg_space.num_dofs())
         {
            throw std::invalid_argument("DG field '" + field.name +
                                        "' has wrong size");
         }
         vf.data.assign(field.values.data(),
                        field.values.data() + field.values.size());
         point_fields.push_back(std::move(vf));
      }
      write_fields(out, point_fields, static_cast<int>(points.size()));
   }
}

VtkField cell_average(const FunctionSpace &dg_space, const Eigen::VectorXd &u,
                      const std::string &name)
{
   if (dg_space.kind() != SpaceKind::DG)
   {
      throw std::invalid_argument("cell_average expects a DG space");
   }
   const Mesh &mesh = dg_space.mesh();
   const int vd = dg_space.value_dim();
   VtkField field;
   field.name = name;
   field.components = vd;
   field.data.assign(mesh.num_cells() * vd, 0.0);
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      for (int a = 0; a < dg_space.local_nodes(); ++a)
      {
         for (int k = 0; k < vd; ++k)
         {
            field.data[c * vd + k] +=
               u[dg_space.dof(c, a, k)] / dg_space.local_nodes();
         }
      }
   }
   return field;
}

void write_text_file(const std::string &path, const std::string &text)
{
   const std::filesystem::path p(path);
   if (p.has_parent_path())
   {
      std::filesystem::create_directories(p.parent_path());
   }
   std::ofstream out(p, std::ios::binary);
   if (!out)
   {
      throw std::runtime_error("cannot open '" + path + "' for writing");
   }
   out << text;
   if (!out.good())
   {
      throw std::runtime_error("failed writing '" + path + "'");
   }
}

} // namespace dgn
