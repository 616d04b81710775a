#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dgnewton/mesh.hpp"

namespace dgn
{

// Quadrature on the reference simplex (unit segment, triangle, tet).
// Weights sum to the reference measure (1, 1/2, 1/6), so physical
// integrals scale by measure(T) / reference measure.
struct QuadratureRule
{
   int dim = 0;
   int degree = 0;                      // polynomial degree integrated exactly
   std::vector<Eigen::Vector3d> points; // reference coordinates, unused = 0
   std::vector<double> weights;

   int size() const { return static_cast<int>(points.size()); }
};

// Rules for degree 1 through 4. Throws std::invalid_argument outside
// that range or for dim outside {1, 2, 3}.
QuadratureRule quadrature(int dim, int degree);

enum class SpaceKind
{
   DG, // element-wise P1, no inter-element coupling of dofs
   CG  // vertex-based P1, continuous
};

// P1 Lagrange space over a mesh, scalar or vector valued.
// Vector dofs are interleaved node-major: dof = node_dof * value_dim + comp.
// Dof maps are closed-form; the object is a cheap view over the mesh.
class FunctionSpace
{
public:
   FunctionSpace(const Mesh &mesh, SpaceKind kind, int degree = 1,
                 int value_dim = 1);

   const Mesh &mesh() const { return *mesh_; }
   SpaceKind kind() const { return kind_; }
   int degree() const { return 1; }
   int value_dim() const { return value_dim_; }
   int local_nodes() const { return mesh_->dim + 1; }
   int local_dofs() const { return local_nodes() * value_dim_; }
   int num_dofs() const;

   // Global dof of (cell, local node, component).
   int dof(int cell, int node, int comp = 0) const;

private:
   const Mesh *mesh_;
   SpaceKind kind_;
   int value_dim_;
};

// P1 basis data on one cell. Gradients are physical and constant over the
// cell; values depend on the evaluation point.
struct CellBasis
{
   int n = 0;                            // dim + 1
   std::array<double, 4> value{};        // at the queried point
   std::array<Eigen::Vector3d, 4> grad{};
};

// Basis values at a physical point (assumed inside the cell) plus the
// constant physical gradients.
CellBasis basis_eval(const Mesh &mesh, int cell, const Eigen::Vector3d &x);

// Gradients only; point-independent for P1.
std::array<Eigen::Vector3d, 4> basis_gradients(const Mesh &mesh, int cell);

// Quadrature points of a face mapped to physical coordinates, with weights
// scaled so they sum to the face measure.
struct FacePoint
{
   Eigen::Vector3d x;
   double weight;
};
std::vector<FacePoint> face_quadrature(const Mesh &mesh, int face, int degree);

// Trace of the basis of the cell on the given side of a face, evaluated at
// a physical point on the face. side = +1 selects cell_plus, -1 cell_minus.
// The minus side of a boundary face is an error.
struct FaceTrace
{
   int cell = -1;
   CellBasis basis;
};
FaceTrace trace_eval(const Mesh &mesh, int face, int side,
                     const Eigen::Vector3d &x);

// Field evaluation for P1 coefficient vectors on a space.
double eval_scalar(const FunctionSpace &space, const Eigen::VectorXd &u,
                   int cell, const Eigen::Vector3d &x);
Eigen::Vector3d grad_scalar(const FunctionSpace &space, const Eigen::VectorXd &u,
                            int cell);
Eigen::Vector3d eval_vector(const FunctionSpace &space, const Eigen::VectorXd &u,
                            int cell, const Eigen::Vector3d &x);
// Displacement gradient H with H(i, J) = d u_i / d x_J.
Eigen::Matrix3d grad_vector(const FunctionSpace &space, const Eigen::VectorXd &u,
                            int cell);

// Copies a CG coefficient vector into the DG dof layout of the same mesh.
// The result has zero jumps across every interior face.
Eigen::VectorXd inject_cg_into_dg(const FunctionSpace &cg, const FunctionSpace &dg,
                                  const Eigen::VectorXd &u_cg);

} // namespace dgn
