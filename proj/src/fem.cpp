#include "dgnewton/fem.hpp"

#include <cmath>

namespace dgn
{

namespace
{

void push(QuadratureRule &rule, double x, double y, double z, double w)
{
   rule.points.emplace_back(x, y, z);
   rule.weights.push_back(w);
}

QuadratureRule segment_rule(int degree)
{
   QuadratureRule rule;
   rule.dim = 1;
   if (degree <= 1)
   {
      rule.degree = 1;
      push(rule, 0.5, 0, 0, 1.0);
   }
   else if (degree <= 3)
   {
      rule.degree = 3;
      const double d = 0.5 / std::sqrt(3.0);
      push(rule, 0.5 - d, 0, 0, 0.5);
      push(rule, 0.5 + d, 0, 0, 0.5);
   }
   else
   {
      rule.degree = 5;
      const double d = 0.5 * std::sqrt(0.6);
      push(rule, 0.5 - d, 0, 0, 5.0 / 18.0);
      push(rule, 0.5, 0, 0, 8.0 / 18.0);
      push(rule, 0.5 + d, 0, 0, 5.0 / 18.0);
   }
   return rule;
}

QuadratureRule triangle_rule(int degree)
{
   QuadratureRule rule;
   rule.dim = 2;
   if (degree <= 1)
   {
      rule.degree = 1;
      push(rule, 1.0 / 3.0, 1.0 / 3.0, 0, 0.5);
   }
   else if (degree == 2)
   {
      rule.degree = 2;
      push(rule, 1.0 / 6.0, 1.0 / 6.0, 0, 1.0 / 6.0);
      push(rule, 2.0 / 3.0, 1.0 / 6.0, 0, 1.0 / 6.0);
      push(rule, 1.0 / 6.0, 2.0 / 3.0, 0, 1.0 / 6.0);
   }
   else
   {
      rule.degree = 4;
      const double a = 0.445948490915965;
      const double wa = 0.223381589678011 * 0.5;
      const double b = 0.091576213509771;
      const double wb = 0.109951743655322 * 0.5;
      push(rule, a, a, 0, wa);
      push(rule, 1 - 2 * a, a, 0, wa);
      push(rule, a, 1 - 2 * a, 0, wa);
      push(rule, b, b, 0, wb);
      push(rule, 1 - 2 * b, b, 0, wb);
      push(rule, b, 1 - 2 * b, 0, wb);
   }
   return rule;
}

QuadratureRule tet_rule(int degree)
{
   QuadratureRule rule;
   rule.dim = 3;
   const double vref = 1.0 / 6.0;
   if (degree <= 1)
   {
      rule.degree = 1;
      push(rule, 0.25, 0.25, 0.25, vref);
   }
   else if (degree == 2)
   {
      rule.degree = 2;
      const double a = 0.585410196624969;
      const double b = 0.138196601125011;
      const double w = 0.25 * vref;
      push(rule, b, b, b, w);
      push(rule, a, b, b, w);
      push(rule, b, a, b, w);
      push(rule, b, b, a, w);
   }
   else if (degree == 3)
   {
      rule.degree = 3;
      push(rule, 0.25, 0.25, 0.25, -0.8 * vref);
      const double a = 0.5, b = 1.0 / 6.0;
      const double w = 0.45 * vref;
      push(rule, b, b, b, w);
      push(rule, a, b, b, w);
      push(rule, b, a, b, w);
      push(rule, b, b, a, w);
   }
   else
   {
      rule.degree = 4;
      push(rule, 0.25, 0.25, 0.25, -148.0 / 1875.0 * vref);
      const double a = 11.0 / 14.0, b = 1.0 / 14.0;
      const double wa = 343.0 / 7500.0 * vref;
      push(rule, b, b, b, wa);
      push(rule, a, b, b, wa);
      push(rule, b, a, b, wa);
      push(rule, b, b, a, wa);
      const double c = 0.25 * (1.0 + std::sqrt(5.0 / 14.0));
      const double d = 0.25 * (1.0 - std::sqrt(5.0 / 14.0));
      const double wc = 56.0 / 375.0 * vref;
      push(rule, c, d, d, wc);
      push(rule, d, c, d, wc);
      push(rule, d, d, c, wc);
      push(rule, c, c, d, wc);
      push(rule, c, d, c, wc);
      push(rule, d, c, c, wc);
   }
   return rule;
}

} // namespace

QuadratureRule quadrature(int dim, int degree)
{
   if (degree < 1 || degree > 4)
   {
      throw std::invalid_argument("quadrature degree " + std::to_string(degree) +
                                  " not supported (1..4)");
   }
   switch (dim)
   {
      case 1:
         return segment_rule(degree);
      case 2:
         return triangle_rule(degree);
      case 3:
         return tet_rule(degree);
      default:
         throw std::invalid_argument("quadrature dim " + std::to_string(dim) +
                                     " not supported (1..3)");
   }
}

FunctionSpace::FunctionSpace(const Mesh &mesh, SpaceKind kind, int degree,
                             int value_dim)
   : mesh_(&mesh), kind_(kind), value_dim_(value_dim)
{
   if (degree != 1)
   {
      throw std::invalid_argument(
         "FunctionSpace: only degree 1 is implemented, got degree " +
         std::to_string(degree));
   }
   if (value_dim < 1)
   {
      throw std::invalid_argument("FunctionSpace: value_dim must be positive");
   }
}

int FunctionSpace::num_dofs() const
{
   const int nodes = kind_ == SpaceKind::DG
                        ? mesh_->num_cells() * local_nodes()
                        : mesh_->num_vertices();
   return nodes * value_dim_;
}

int FunctionSpace::dof(int cell, int node, int comp) const
{
   const int node_dof = kind_ == SpaceKind::DG
                           ? cell * local_nodes() + node
                           : mesh_->cells[cell][node];
   return node_dof * value_dim_ + comp;
}

std::array<Eigen::Vector3d, 4> basis_gradients(const Mesh &mesh, int cell)
{
   std::array<Eigen::Vector3d, 4> grad;
   grad.fill(Eigen::Vector3d::Zero());
   const auto &c = mesh.cells[cell];
   const Eigen::Vector3d &p0 = mesh.vertices[c[0]];
   if (mesh.dim == 2)
   {
      Eigen::Matrix2d A;
      A.col(0) = (mesh.vertices[c[1]] - p0).head<2>();
      A.col(1) = (mesh.vertices[c[2]] - p0).head<2>();
      const Eigen::Matrix2d Ainv = A.inverse();
      for (int a = 1; a <= 2; ++a)
      {
         grad[a].head<2>() = Ainv.row(a - 1).transpose();
      }
   }
   else
   {
      Eigen::Matrix3d A;
      for (int a = 1; a <= 3; ++a)
      {
         A.col(a - 1) = mesh.vertices[c[a]] - p0;
      }
      const Eigen::Matrix3d Ainv = A.inverse();
      for (int a = 1; a <= 3; ++a)
      {
         grad[a] = Ainv.row(a - 1).transpose();
      }
   }
   grad[0] = -(grad[1] + grad[2] + grad[3]);
   return grad;
}

CellBasis basis_eval(const Mesh &mesh, int cell, const Eigen::Vector3d &x)
{
   CellBasis out;
   out.n = mesh.dim + 1;
   out.grad = basis_gradients(mesh, cell);
   const Eigen::Vector3d d = x - mesh.vertices[mesh.cells[cell][0]];
   double lambda0 = 1.0;
   for (int a = 1; a <= mesh.dim; ++a)
   {
      out.value[a] = out.grad[a].dot(d);
      lambda0 -= out.value[a];
   }
   out.value[0] = lambda0;
   return out;
}

std::vector<FacePoint> face_quadrature(const Mesh &mesh, int face, int degree)
{
   const Face &f = mesh.faces[face];
   std::vector<FacePoint> points;
   if (mesh.dim == 2)
   {
      const QuadratureRule rule = quadrature(1, degree);
      const Eigen::Vector3d &a = mesh.vertices[f.vertices[0]];
      const Eigen::Vector3d &b = mesh.vertices[f.vertices[1]];
      for (int q = 0; q < rule.size(); ++q)
      {
         const double t = rule.points[q].x();
         points.push_back({a + t * (b - a), rule.weights[q] * f.measure});
      }
   }
   else
   {
      const QuadratureRule rule = quadrature(2, degree);
      const Eigen::Vector3d &a = mesh.vertices[f.vertices[0]];
      const Eigen::Vector3d &b = mesh.vertices[f.vertices[1]];
      const Eigen::Vector3d &c = mesh.vertices[f.vertices[2]];
      for (int q = 0; q < rule.size(); ++q)
      {
         const double xi = rule.points[q].x(), eta = rule.points[q].y();
         points.push_back({a + xi * (b - a) + eta * (c - a),
                           rule.weights[q] * f.measure / 0.5});
      }
   }
   return points;
}

FaceTrace trace_eval(const Mesh &mesh, int face, int side, const Eigen::Vector3d &x)
{
   const Face &f = mesh.faces[face];
   if (side != 1 && side != -1)
   {
      throw std::invalid_argument("trace_eval: side must be +1 or -1");
   }
   if (side == -1 && f.boundary())
   {
      throw std::invalid_argument("trace_eval: boundary face has no minus side");
   }
   const int cell = side == 1 ? f.cell_plus : f.cell_minus;
   return {cell, basis_eval(mesh, cell, x)};
}

double eval_scalar(const FunctionSpace &space, const Eigen::VectorXd &u, int cell,
                   const Eigen::Vector3d &x)
{
   const CellBasis basis = basis_eval(space.mesh(), cell, x);
   double v = 0.0;
   for (int a = 0; a < basis.n; ++a)
   {
      v += u[space.dof(cell, a)] * basis.value[a];
   }
   return v;
}

Eigen::Vector3d grad_scalar(const FunctionSpace &space, const Eigen::VectorXd &u,
                            int cell)
{
   const auto grad = basis_gradients(space.mesh(), cell);
   Eigen::Vector3d g = Eigen::Vector3d::Zero();
   for (int a = 0; a < space.local_nodes(); ++a)
   {
      g += u[space.dof(cell, a)] * grad[a];
   }
   return g;
}

Eigen::Vector3d eval_vector(const FunctionSpace &space, const Eigen::VectorXd &u,
                            int cell, const Eigen::Vector3d &x)
{
   const CellBasis basis = basis_eval(space.mesh(), cell, x);
   Eigen::Vector3d v = Eigen::Vector3d::Zero();
   for (int a = 0; a < basis.n; ++a)
   {
      for (int c = 0; c < space.value_dim(); ++c)
      {
         v[c] += u[space.dof(cell, a, c)] * basis.value[a];
      }
   }
   return v;
}

Eigen::Matrix3d grad_vector(const FunctionSpace &space, const Eigen::VectorXd &u,
                            int cell)
{
   const auto grad = basis_gradients(space.mesh(), cell);
   Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
   for (int a = 0; a < space.local_nodes(); ++a)
   {
      for (int c = 0; c < space.value_dim(); ++c)
      {
         H.row(c) += u[space.dof(cell, a, c)] * grad[a].transpose();
      }
   }
   return H;
}

Eigen::VectorXd inject_cg_into_dg(const FunctionSpace &cg, const FunctionSpace &dg,
                                  const Eigen::VectorXd &u_cg)
{
   Eigen::VectorXd u_dg(dg.num_dofs());
   const Mesh &mesh = dg.mesh();
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      for (int a = 0; a < dg.local_nodes(); ++a)
      {
         for (int k = 0; k < dg.value_dim(); ++k)
         {
            u_dg[dg.dof(c, a, k)] = u_cg[cg.dof(c, a, k)];
         }
      }
   }
   return u_dg;
}

} // namespace dgn
