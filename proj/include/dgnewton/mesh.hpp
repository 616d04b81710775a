#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dgn
{

// Oriented interface between simplices, or a boundary facet.
//
// The normal is fixed once at topology build time: it points out of the
// plus cell, and the plus cell is the one with the lower cell index.
// Traces are taken against this normal: the plus trace is the limit from
// the side the normal points away from. Boundary faces have cell_minus < 0
// and an outward normal.
struct Face
{
   std::array<int, 3> vertices{{-1, -1, -1}}; // dim entries used, sorted
   int cell_plus = -1;
   int cell_minus = -1;
   double measure = 0.0;                      // |E|: length (2D) or area (3D)
   double h = 0.0;                            // min adjacent |T| / |E|
   Eigen::Vector3d normal = Eigen::Vector3d::Zero();

   bool boundary() const { return cell_minus < 0; }
};

// Conforming simplicial mesh in 2D (triangles) or 3D (tetrahedra).
// Vertices always carry three coordinates; 2D meshes keep z = 0.
// Cells store dim+1 vertex indices each, positively oriented.
struct Mesh
{
   int dim = 2;
   std::vector<Eigen::Vector3d> vertices;
   std::vector<std::array<int, 4>> cells;     // dim+1 entries used
   std::vector<Face> faces;
   std::map<int, std::string> boundary_tags;  // face index -> tag

   int num_vertices() const { return static_cast<int>(vertices.size()); }
   int num_cells() const { return static_cast<int>(cells.size()); }
   int num_faces() const { return static_cast<int>(faces.size()); }
   int nodes_per_cell() const { return dim + 1; }

   const std::string &tag(int face) const;
};

struct MeshError : std::runtime_error
{
   using std::runtime_error::runtime_error;
};

// Measure of cell c: area in 2D, volume in 3D.
// Throws MeshError for a degenerate (collinear / coplanar) simplex.
double cell_measure(const Mesh &mesh, int cell);

// Barycenter of cell c.
Eigen::Vector3d cell_centroid(const Mesh &mesh, int cell);

// Vertex coordinates of a cell as columns.
Eigen::Matrix<double, 3, 4> cell_coords(const Mesh &mesh, int cell);

// Local index (0..dim) of the cell vertex opposite the given face,
// i.e. the one not shared with the face.
int opposite_vertex(const Mesh &mesh, int cell, int face);

// Enumerates faces from cell connectivity and fixes their orientation.
// Idempotent; generators call it, imported meshes get it applied by
// read_mesh. Cells are reordered to positive orientation first. Throws
// MeshError if a face is shared by more than two cells or the mesh has
// a degenerate cell. Existing boundary tags are preserved when the
// rebuilt face set matches; otherwise tags are cleared.
void build_face_topology(Mesh &mesh);

// Structured triangulation of the unit square with n x n quads, each split
// along the same diagonal (lower-left to upper-right). 2*n*n cells. The
// mesh maps onto itself under (x1, x2) -> (x2, x1). All boundary faces are
// tagged "dirichlet".
Mesh unit_square_mesh(int n);

// Structured tetrahedralization of (0,L1)x(0,L2)x(0,L3) with n1 x n2 x n3
// hexahedra, each split into six tetrahedra sharing the main diagonal.
// Boundary faces on the X = 0 plane are tagged "dirichlet", all other
// boundary faces "free".
Mesh box_mesh(const Eigen::Vector3d &lengths, const std::array<int, 3> &divisions);

// Like box_mesh, but each hexahedron is split into 24 tetrahedra through
// its face centers and body center. Coarser-grained than needed for plain
// runs; its point is symmetry: the mesh maps onto itself under the
// half-turn about the axis {y = L2/2, z = L3/2}, which box_mesh does not.
Mesh box_mesh_symmetric(const Eigen::Vector3d &lengths,
                        const std::array<int, 3> &divisions);

// Plain-text mesh exchange format:
//
//   dim <d>
//   vertices <nv>
//   <x> <y> [<z>]          (nv lines)
//   cells <nc>
//   <v0> ... <vd>           (nc lines)
//   boundary_tags <nt>
//   <sorted face vertices> <tag>   (nt lines)
//
// read_mesh rebuilds face topology and resolves tag lines against it.
Mesh read_mesh(std::istream &in);
void write_mesh(std::ostream &out, const Mesh &mesh);

} // namespace dgn
