#include "dgnewton/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace dgn
{

namespace
{

// Signed measure times d!: det of edge vectors. 2D uses the z = 0 plane.
double signed_det(const Mesh &mesh, const std::array<int, 4> &cell, int dim)
{
   const Eigen::Vector3d &p0 = mesh.vertices[cell[0]];
   if (dim == 2)
   {
      Eigen::Vector3d e1 = mesh.vertices[cell[1]] - p0;
      Eigen::Vector3d e2 = mesh.vertices[cell[2]] - p0;
      return e1.x() * e2.y() - e1.y() * e2.x();
   }
   Eigen::Matrix3d E;
   for (int k = 0; k < 3; ++k)
   {
      E.col(k) = mesh.vertices[cell[k + 1]] - p0;
   }
   return E.determinant();
}

double cell_scale(const Mesh &mesh, const std::array<int, 4> &cell, int dim)
{
   double s = 0.0;
   for (int a = 0; a <= dim; ++a)
   {
      for (int b = a + 1; b <= dim; ++b)
      {
         s = std::max(s, (mesh.vertices[cell[a]] - mesh.vertices[cell[b]]).norm());
      }
   }
   return s;
}

std::array<int, 3> face_key(const std::array<int, 4> &cell, int skip, int dim)
{
   std::array<int, 3> key{{-1, -1, -1}};
   int k = 0;
   for (int a = 0; a <= dim; ++a)
   {
      if (a != skip)
      {
         key[k++] = cell[a];
      }
   }
   std::sort(key.begin(), key.begin() + dim);
   return key;
}

double face_area(const Mesh &mesh, const std::array<int, 3> &v, int dim)
{
   if (dim == 2)
   {
      return (mesh.vertices[v[1]] - mesh.vertices[v[0]]).norm();
   }
   Eigen::Vector3d e1 = mesh.vertices[v[1]] - mesh.vertices[v[0]];
   Eigen::Vector3d e2 = mesh.vertices[v[2]] - mesh.vertices[v[0]];
   return 0.5 * e1.cross(e2).norm();
}

Eigen::Vector3d face_centroid(const Mesh &mesh, const std::array<int, 3> &v, int dim)
{
   Eigen::Vector3d c = Eigen::Vector3d::Zero();
   for (int k = 0; k < dim; ++k)
   {
      c += mesh.vertices[v[k]];
   }
   return c / dim;
}

void tag_box_boundary(Mesh &mesh)
{
   const double tol = 1e-12;
   for (int f = 0; f < mesh.num_faces(); ++f)
   {
      const Face &face = mesh.faces[f];
      if (!face.boundary())
      {
         continue;
      }
      bool on_x0 = true;
      for (int k = 0; k < mesh.dim; ++k)
      {
         on_x0 = on_x0 && std::abs(mesh.vertices[face.vertices[k]].x()) < tol;
      }
      mesh.boundary_tags[f] = on_x0 ? "dirichlet" : "free";
   }
}

} // namespace

const std::string &Mesh::tag(int face) const
{
   static const std::string untagged;
   auto it = boundary_tags.find(face);
   return it == boundary_tags.end() ? untagged : it->second;
}

double cell_measure(const Mesh &mesh, int cell)
{
   const auto &c = mesh.cells[cell];
   const double det = signed_det(mesh, c, mesh.dim);
   const double fact = mesh.dim == 2 ? 2.0 : 6.0;
   const double scale = cell_scale(mesh, c, mesh.dim);
   const double measure = std::abs(det) / fact;
   if (!(measure > 1e-14 * std::pow(scale, mesh.dim)))
   {
      throw MeshError("degenerate cell " + std::to_string(cell));
   }
   return measure;
}

Eigen::Vector3d cell_centroid(const Mesh &mesh, int cell)
{
   Eigen::Vector3d c = Eigen::Vector3d::Zero();
   for (int a = 0; a <= mesh.dim; ++a)
   {
      c += mesh.vertices[mesh.cells[cell][a]];
   }
   return c / (mesh.dim + 1);
}

Eigen::Matrix<double, 3, 4> cell_coords(const Mesh &mesh, int cell)
{
   Eigen::Matrix<double, 3, 4> X = Eigen::Matrix<double, 3, 4>::Zero();
   for (int a = 0; a <= mesh.dim; ++a)
   {
      X.col(a) = mesh.vertices[mesh.cells[cell][a]];
   }
   return X;
}

int opposite_vertex(const Mesh &mesh, int cell, int face)
{
   const auto &fv = mesh.faces[face].vertices;
   for (int a = 0; a <= mesh.dim; ++a)
   {
      const int v = mesh.cells[cell][a];
      bool in_face = false;
      for (int k = 0; k < mesh.dim; ++k)
      {
         in_face = in_face || fv[k] == v;
      }
      if (!in_face)
      {
         return a;
      }
   }
   throw MeshError("cell " + std::to_string(cell) + " does not touch face " +
                   std::to_string(face));
}

void build_face_topology(Mesh &mesh)
{
   if (mesh.dim != 2 && mesh.dim != 3)
   {
      throw MeshError("unsupported dimension " + std::to_string(mesh.dim));
   }

   // Tags keyed by face index do not survive re-enumeration; rescue them
   // by vertex set.
   std::map<std::array<int, 3>, std::string> saved_tags;
   for (const auto &[f, tag] : mesh.boundary_tags)
   {
      if (f >= 0 && f < mesh.num_faces())
      {
         saved_tags[mesh.faces[f].vertices] = tag;
      }
   }

   for (auto &cell : mesh.cells)
   {
      if (signed_det(mesh, cell, mesh.dim) < 0)
      {
         std::swap(cell[mesh.dim - 1], cell[mesh.dim]);
      }
   }

   mesh.faces.clear();
   mesh.boundary_tags.clear();
   std::map<std::array<int, 3>, int> index;
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      for (int a = 0; a <= mesh.dim; ++a)
      {
         const auto key = face_key(mesh.cells[c], a, mesh.dim);
         auto [it, inserted] = index.try_emplace(key, mesh.num_faces());
         if (inserted)
         {
            Face face;
            face.vertices = key;
            face.cell_plus = c;
            mesh.faces.push_back(face);
         }
         else
         {
            Face &face = mesh.faces[it->second];
            if (!face.boundary())
            {
               throw MeshError("face shared by more than two cells");
            }
            face.cell_minus = c;
         }
      }
   }

   for (int f = 0; f < mesh.num_faces(); ++f)
   {
      Face &face = mesh.faces[f];
      face.measure = face_area(mesh, face.vertices, mesh.dim);
      const double plus_measure = cell_measure(mesh, face.cell_plus);
      double min_measure = plus_measure;
      if (!face.boundary())
      {
         min_measure = std::min(min_measure, cell_measure(mesh, face.cell_minus));
      }
      if (!(face.measure > 0.0))
      {
         throw MeshError("degenerate face " + std::to_string(f));
      }
      face.h = min_measure / face.measure;

      Eigen::Vector3d n;
      if (mesh.dim == 2)
      {
         Eigen::Vector3d e = mesh.vertices[face.vertices[1]] -
                             mesh.vertices[face.vertices[0]];
         n = Eigen::Vector3d(e.y(), -e.x(), 0.0);
      }
      else
      {
         Eigen::Vector3d e1 = mesh.vertices[face.vertices[1]] -
                              mesh.vertices[face.vertices[0]];
         Eigen::Vector3d e2 = mesh.vertices[face.vertices[2]] -
                              mesh.vertices[face.vertices[0]];
         n = e1.cross(e2);
      }
      n.normalize();
      const Eigen::Vector3d outward =
         face_centroid(mesh, face.vertices, mesh.dim) -
         cell_centroid(mesh, face.cell_plus);
      if (n.dot(outward) < 0)
      {
         n = -n;
      }
      face.normal = n;

      auto it = saved_tags.find(face.vertices);
      if (it != saved_tags.end() && face.boundary())
      {
         mesh.boundary_tags[f] = it->second;
      }
   }
}

Mesh unit_square_mesh(int n)
{
   if (n < 1)
   {
      throw MeshError("unit_square_mesh needs n >= 1");
   }
   Mesh mesh;
   mesh.dim = 2;
   const int nv = n + 1;
   auto vid = [nv](int i, int j) { return j * nv + i; };
   for (int j = 0; j < nv; ++j)
   {
      for (int i = 0; i < nv; ++i)
      {
         mesh.vertices.emplace_back(double(i) / n, double(j) / n, 0.0);
      }
   }
   for (int j = 0; j < n; ++j)
   {
      for (int i = 0; i < n; ++i)
      {
         const int v00 = vid(i, j), v10 = vid(i + 1, j);
         const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
         mesh.cells.push_back({v00, v10, v11, -1});
         mesh.cells.push_back({v00, v11, v01, -1});
      }
   }
   build_face_topology(mesh);
   for (int f = 0; f < mesh.num_faces(); ++f)
   {
      if (mesh.faces[f].boundary())
      {
         mesh.boundary_tags[f] = "dirichlet";
      }
   }
   return mesh;
}

Mesh box_mesh(const Eigen::Vector3d &lengths, const std::array<int, 3> &divisions)
{
   for (int k = 0; k < 3; ++k)
   {
      if (divisions[k] < 1 || !(lengths[k] > 0))
      {
         throw MeshError("box_mesh needs positive lengths and divisions");
      }
   }
   Mesh mesh;
   mesh.dim = 3;
   const int n1 = divisions[0], n2 = divisions[1], n3 = divisions[2];
   auto vid = [&](int i, int j, int k)
   { return (k * (n2 + 1) + j) * (n1 + 1) + i; };
   for (int k = 0; k <= n3; ++k)
   {
      for (int j = 0; j <= n2; ++j)
      {
         for (int i = 0; i <= n1; ++i)
         {
            mesh.vertices.emplace_back(lengths.x() * i / n1, lengths.y() * j / n2,
                                       lengths.z() * k / n3);
         }
      }
   }
   // Six tetrahedra per hexahedron, all sharing the main diagonal: one per
   // axis order of the lattice path from corner (0,0,0) to (1,1,1).
   // Neighboring hexahedra split identically, so faces match.
   static const int paths[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                   {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
   for (int k = 0; k < n3; ++k)
   {
      for (int j = 0; j < n2; ++j)
      {
         for (int i = 0; i < n1; ++i)
         {
            for (const auto &path : paths)
            {
               std::array<int, 4> cell{};
               int d[3] = {0, 0, 0};
               cell[0] = vid(i, j, k);
               for (int s = 0; s < 3; ++s)
               {
                  d[path[s]] = 1;
                  cell[s + 1] = vid(i + d[0], j + d[1], k + d[2]);
               }
               mesh.cells.push_back(cell);
            }
         }
      }
   }
   build_face_topology(mesh);
   tag_box_boundary(mesh);
   return mesh;
}

Mesh box_mesh_symmetric(const Eigen::Vector3d &lengths,
                        const std::array<int, 3> &divisions)
{
   for (int k = 0; k < 3; ++k)
   {
      if (divisions[k] < 1 || !(lengths[k] > 0))
      {
         throw MeshError("box_mesh_symmetric needs positive lengths and divisions");
      }
   }
   Mesh mesh;
   mesh.dim = 3;
   const int n1 = divisions[0], n2 = divisions[1], n3 = divisions[2];
   auto point = [&](double i, double j, double k)
   {
      return Eigen::Vector3d(lengths.x() * i / n1, lengths.y() * j / n2,
                             lengths.z() * k / n3);
   };
   // Grid corners plus shared face centers plus one body center per hex.
   // Coordinates are half-integer multiples of the grid step; key vertices
   // by doubled indices to dedupe face centers between neighbors.
   std::map<std::array<int, 3>, int> ids;
   auto vid = [&](int ii, int jj, int kk)
   {
      auto [it, inserted] = ids.try_emplace({ii, jj, kk}, mesh.num_vertices());
      if (inserted)
      {
         mesh.vertices.push_back(point(ii / 2.0, jj / 2.0, kk / 2.0));
      }
      return it->second;
   };
   for (int k = 0; k < n3; ++k)
   {
      for (int j = 0; j < n2; ++j)
      {
         for (int i = 0; i < n1; ++i)
         {
            const int center = vid(2 * i + 1, 2 * j + 1, 2 * k + 1);
            // Each hex face contributes four triangles fanned around its
            // center; each triangle plus the body center is one tet.
            for (int axis = 0; axis < 3; ++axis)
            {
               for (int side = 0; side < 2; ++side)
               {
                  int fc[3] = {2 * i + 1, 2 * j + 1, 2 * k + 1};
                  fc[axis] += side ? 1 : -1;
                  const int face_center = vid(fc[0], fc[1], fc[2]);
                  const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                  static const int ring[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
                  for (int t = 0; t < 4; ++t)
                  {
                     int corner[3];
                     corner[axis] = fc[axis];
                     corner[u] = fc[u] + ring[t][0];
                     corner[v] = fc[v] + ring[t][1];
                     const int c0 = vid(corner[0], corner[1], corner[2]);
                     corner[u] = fc[u] + ring[(t + 1) % 4][0];
                     corner[v] = fc[v] + ring[(t + 1) % 4][1];
                     const int c1 = vid(corner[0], corner[1], corner[2]);
                     mesh.cells.push_back({center, face_center, c0, c1});
                  }
               }
            }
         }
      }
   }
   build_face_topology(mesh);
   tag_box_boundary(mesh);
   return mesh;
}

Mesh read_mesh(std::istream &in)
{
   auto fail = [](const std::string &what)
   { throw MeshError("mesh parse error: " + what); };

   std::string keyword;
   Mesh mesh;
   if (!(in >> keyword) || keyword != "dim" || !(in >> mesh.dim))
   {
      fail("expected 'dim <d>'");
   }
   if (mesh.dim != 2 && mesh.dim != 3)
   {
      fail("dim must be 2 or 3");
   }

   int nv = 0;
   if (!(in >> keyword) || keyword != "vertices" || !(in >> nv) || nv < 0)
   {
      fail("expected 'vertices <count>'");
   }
   mesh.vertices.resize(nv, Eigen::Vector3d::Zero());
   for (auto &v : mesh.vertices)
   {
      for (int k = 0; k < mesh.dim; ++k)
      {
         if (!(in >> v[k]))
         {
            fail("bad vertex line");
         }
      }
   }

   int nc = 0;
   if (!(in >> keyword) || keyword != "cells" || !(in >> nc) || nc < 0)
   {
      fail("expected 'cells <count>'");
   }
   mesh.cells.resize(nc, {-1, -1, -1, -1});
   for (auto &cell : mesh.cells)
   {
      for (int a = 0; a <= mesh.dim; ++a)
      {
         if (!(in >> cell[a]) || cell[a] < 0 || cell[a] >= nv)
         {
            fail("bad cell line");
         }
      }
   }

   build_face_topology(mesh);

   int nt = 0;
   if (!(in >> keyword) || keyword != "boundary_tags" || !(in >> nt) || nt < 0)
   {
      fail("expected 'boundary_tags <count>'");
   }
   std::map<std::array<int, 3>, int> boundary_index;
   for (int f = 0; f < mesh.num_faces(); ++f)
   {
      if (mesh.faces[f].boundary())
      {
         boundary_index[mesh.faces[f].vertices] = f;
      }
   }
   for (int t = 0; t < nt; ++t)
   {
      std::array<int, 3> key{{-1, -1, -1}};
      std::string tag;
      for (int k = 0; k < mesh.dim; ++k)
      {
         if (!(in >> key[k]))
         {
            fail("bad boundary tag line");
         }
      }
      std::sort(key.begin(), key.begin() + mesh.dim);
      if (!(in >> tag))
      {
         fail("bad boundary tag line");
      }
      auto it = boundary_index.find(key);
      if (it == boundary_index.end())
      {
         fail("tagged face is not a boundary face");
      }
      mesh.boundary_tags[it->second] = tag;
   }
   return mesh;
}

void write_mesh(std::ostream &out, const Mesh &mesh)
{
   out << "dim " << mesh.dim << "\n";
   out << "vertices " << mesh.num_vertices() << "\n";
   out.precision(17);
   for (const auto &v : mesh.vertices)
   {
      out << v.x() << " " << v.y();
      if (mesh.dim == 3)
      {
         out << " " << v.z();
      }
      out << "\n";
   }
   out << "cells " << mesh.num_cells() << "\n";
   for (const auto &cell : mesh.cells)
   {
      for (int a = 0; a <= mesh.dim; ++a)
      {
         out << (a ? " " : "") << cell[a];
      }
      out << "\n";
   }
   out << "boundary_tags " << mesh.boundary_tags.size() << "\n";
   for (const auto &[f, tag] : mesh.boundary_tags)
   {
      for (int k = 0; k < mesh.dim; ++k)
      {
         out << mesh.faces[f].vertices[k] << " ";
      }
      out << tag << "\n";
   }
}

} // namespace dgn
