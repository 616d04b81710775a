#include "dgnewton/dg_elasticity.hpp"

#include <cmath>

#include "dgnewton/parallel.hpp"

namespace dgn
{

namespace
{

constexpr int kCellQuadDegree = 3;
constexpr int kFaceQuadDegree = 2;

void require_3d(const ElasticityProblem &problem)
{
   if (problem.mesh.dim != 3)
   {
      throw std::invalid_argument("elasticity assembly expects a 3D mesh");
   }
}

Eigen::Matrix3d deformation_gradient(const FunctionSpace &space,
                                     const Eigen::VectorXd &u, int cell)
{
   return Eigen::Matrix3d::Identity() + grad_vector(space, u, cell);
}

// Cell contribution: tangent (v x grad) : dP/dF : (du x grad), residual
// -(P, v x grad) + (s f, v).
void cell_kernel(const ElasticityProblem &problem, const FunctionSpace &space,
                 const Eigen::VectorXd &u_n, double s, int c,
                 std::vector<Eigen::Triplet<double>> &triplets,
                 Eigen::VectorXd &rhs)
{
   const Mesh &mesh = problem.mesh;
   const double measure = cell_measure(mesh, c);
   const auto grads = basis_gradients(mesh, c);
   const int nn = mesh.nodes_per_cell();

   const Eigen::Matrix3d F = deformation_gradient(space, u_n, c);
   Tangent4 L;
   Eigen::Matrix3d P;
   try
   {
      L = problem.material.tangent(F);
      P = problem.material.stress(F);
   }
   catch (const InvertedElementError &err)
   {
      throw InvertedElementError(err.det_f, c);
   }

   for (int a = 0; a < nn; ++a)
   {
      for (int b = 0; b < nn; ++b)
      {
         for (int ci = 0; ci < 3; ++ci)
         {
            for (int d = 0; d < 3; ++d)
            {
               double value = 0.0;
               for (int A = 0; A < 3; ++A)
               {
                  for (int B = 0; B < 3; ++B)
                  {
                     value += L(ci, A, d, B) * grads[a][A] * grads[b][B];
                  }
               }
               triplets.emplace_back(space.dof(c, a, ci), space.dof(c, b, d),
                                     measure * value);
            }
         }
      }
   }

   for (int a = 0; a < nn; ++a)
   {
      for (int ci = 0; ci < 3; ++ci)
      {
         rhs[space.dof(c, a, ci)] -= measure * P.row(ci).dot(grads[a]);
      }
   }

   if (problem.body_force)
   {
      const QuadratureRule rule = quadrature(3, kCellQuadDegree);
      const Eigen::Matrix<double, 3, 4> X = cell_coords(mesh, c);
      for (int q = 0; q < rule.size(); ++q)
      {
         const Eigen::Vector3d &xi = rule.points[q];
         const double lambda[4] = {1.0 - xi.x() - xi.y() - xi.z(), xi.x(), xi.y(),
                                   xi.z()};
         Eigen::Vector3d x = Eigen::Vector3d::Zero();
         for (int a = 0; a < nn; ++a)
         {
            x += lambda[a] * X.col(a);
         }
         const double w = rule.weights[q] * measure / (1.0 / 6.0);
         const Eigen::Vector3d f = s * problem.body_force(x);
         for (int a = 0; a < nn; ++a)
         {
            for (int ci = 0; ci < 3; ++ci)
            {
               rhs[space.dof(c, a, ci)] += w * f[ci] * lambda[a];
            }
         }
      }
   }
}

struct FaceNode
{
   int cell;
   int local;
   double jump_sign;
   double avg_factor;
   Eigen::Vector3d grad;
};

// Interior penalty face contribution. Clamped faces use one-sided values
// and zero boundary data; other boundary faces carry no terms.
void face_kernel(const ElasticityProblem &problem, const FunctionSpace &space,
                 const Eigen::VectorXd &u_n, int f,
                 std::vector<Eigen::Triplet<double>> &triplets,
                 Eigen::VectorXd &rhs)
{
   const Mesh &mesh = problem.mesh;
   const Face &face = mesh.faces[f];
   const bool boundary = face.boundary();
   if (boundary && mesh.tag(f) != "dirichlet")
   {
      return;
   }

   const int nn = mesh.nodes_per_cell();
   const int p = face.cell_plus;
   const Eigen::Matrix3d F_plus = deformation_gradient(space, u_n, p);
   Eigen::Matrix3d F_bar = F_plus;

   std::vector<FaceNode> nodes;
   nodes.reserve(2 * nn);
   const double avg = boundary ? 1.0 : 0.5;
   {
      const auto grads = basis_gradients(mesh, p);
      for (int a = 0; a < nn; ++a)
      {
         nodes.push_back({p, a, 1.0, avg, grads[a]});
      }
   }
   if (!boundary)
   {
      const int m = face.cell_minus;
      F_bar = 0.5 * (F_plus + deformation_gradient(space, u_n, m));
      const auto grads = basis_gradients(mesh, m);
      for (int a = 0; a < nn; ++a)
      {
         nodes.push_back({m, a, -1.0, avg, grads[a]});
      }
   }

   Tangent4 L;
   Eigen::Matrix3d P_bar;
   try
   {
      L = problem.material.tangent(F_bar);
      P_bar = problem.material.stress(F_bar);
   }
   catch (const InvertedElementError &err)
   {
      throw InvertedElementError(err.det_f, p);
   }

   const Eigen::Vector3d N = face.normal;
   const double penalty = problem.gamma0 / face.h;
   const int ne = static_cast<int>(nodes.size());

   // C(c, d) = L(c, A, d, B) N_A N_B; symmetric by major symmetry.
   Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
   for (int ci = 0; ci < 3; ++ci)
   {
      for (int d = 0; d < 3; ++d)
      {
         for (int A = 0; A < 3; ++A)
         {
            for (int B = 0; B < 3; ++B)
            {
               C(ci, d) += L(ci, A, d, B) * N[A] * N[B];
            }
         }
      }
   }

   // G_e(c, d) = avg_e L(c, A, d, B) N_A grad_e[B]: the traction
   // linearization of node e acting on component pair (c, d).
   std::vector<Eigen::Matrix3d> G(ne, Eigen::Matrix3d::Zero());
   for (int e = 0; e < ne; ++e)
   {
      for (int ci = 0; ci < 3; ++ci)
      {
         for (int d = 0; d < 3; ++d)
         {
            double value = 0.0;
            for (int A = 0; A < 3; ++A)
            {
               for (int B = 0; B < 3; ++B)
               {
                  value += L(ci, A, d, B) * N[A] * nodes[e].grad[B];
               }
            }
            G[e](ci, d) = nodes[e].avg_factor * value;
         }
      }
   }

   const Eigen::Vector3d PN = P_bar * N;

   std::vector<double> phi(ne);
   for (const auto &[x, w] : face_quadrature(mesh, f, kFaceQuadDegree))
   {
      const CellBasis basis_p = basis_eval(mesh, p, x);
      CellBasis basis_m;
      if (!boundary)
      {
         basis_m = basis_eval(mesh, face.cell_minus, x);
      }
      for (int e = 0; e < ne; ++e)
      {
         const double value = nodes[e].cell == p ? basis_p.value[nodes[e].local]
                                                 : basis_m.value[nodes[e].local];
         phi[e] = nodes[e].jump_sign * value;
      }

      Eigen::Vector3d jump_u = Eigen::Vector3d::Zero();
      for (int e = 0; e < ne; ++e)
      {
         for (int d = 0; d < 3; ++d)
         {
            jump_u[d] += phi[e] * u_n[space.dof(nodes[e].cell, nodes[e].local, d)];
         }
      }

      for (int e = 0; e < ne; ++e)
      {
         for (int b = 0; b < ne; ++b)
         {
            for (int ci = 0; ci < 3; ++ci)
            {
               for (int d = 0; d < 3; ++d)
               {
                  const double value = -phi[e] * G[b](ci, d) - phi[b] * G[e](d, ci) +
                                       penalty * phi[e] * phi[b] * C(ci, d);
                  triplets.emplace_back(space.dof(nodes[e].cell, nodes[e].local, ci),
                                        space.dof(nodes[b].cell, nodes[b].local, d),
                                        w * value);
               }
            }
         }
      }

      const Eigen::Vector3d pen_u = C * jump_u; // C symmetric
      for (int e = 0; e < ne; ++e)
      {
         const Eigen::Vector3d lin_u = G[e].transpose() * jump_u;
         for (int ci = 0; ci < 3; ++ci)
         {
            rhs[space.dof(nodes[e].cell, nodes[e].local, ci)] +=
               w * (phi[e] * PN[ci] - penalty * phi[e] * pen_u[ci] + lin_u[ci]);
         }
      }
   }
}

} // namespace

SparseSystem assemble_elasticity_dg(const ElasticityProblem &problem,
                                    const Eigen::VectorXd &u_n, double s,
                                    const ElasticityAssemblyOptions &options)
{
   require_3d(problem);
   const FunctionSpace space(problem.mesh, SpaceKind::DG, 1, 3);
   if (u_n.size() != space.num_dofs())
   {
      throw std::invalid_argument("state vector size does not match the space");
   }
   SparseSystem system(space.num_dofs());
   const int threads = resolve_threads(options.threads);

   assemble_items(problem.mesh.num_cells(), threads, system.triplets, system.rhs,
                  [&](int c, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { cell_kernel(problem, space, u_n, s, c, t, r); });
   assemble_items(problem.mesh.num_faces(), threads, system.triplets, system.rhs,
                  [&](int f, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { face_kernel(problem, space, u_n, f, t, r); });
   return system;
}

Eigen::SparseMatrix<double>
assemble_dg_tangent(const ElasticityProblem &problem, const Eigen::VectorXd &u_n,
                    const ElasticityAssemblyOptions &options)
{
   return assemble_elasticity_dg(problem, u_n, 1.0, options).matrix();
}

Eigen::VectorXd assemble_dg_residual(const ElasticityProblem &problem,
                                     const Eigen::VectorXd &u_n, double s,
                                     const ElasticityAssemblyOptions &options)
{
   return assemble_elasticity_dg(problem, u_n, s, options).rhs;
}

std::vector<char> clamped_dofs(const Mesh &mesh)
{
   const FunctionSpace space(mesh, SpaceKind::CG, 1, 3);
   std::vector<char> clamped(space.num_dofs(), 0);
   for (const auto &[f, tag] : mesh.boundary_tags)
   {
      if (tag != "dirichlet")
      {
         continue;
      }
      for (int k = 0; k < mesh.dim; ++k)
      {
         const int vertex = mesh.faces[f].vertices[k];
         for (int c = 0; c < 3; ++c)
         {
            clamped[vertex * 3 + c] = 1;
         }
      }
   }
   return clamped;
}

SparseSystem assemble_elasticity_cg(const ElasticityProblem &problem,
                                    const Eigen::VectorXd &u_n, double s,
                                    const ElasticityAssemblyOptions &options)
{
   require_3d(problem);
   const FunctionSpace space(problem.mesh, SpaceKind::CG, 1, 3);
   if (u_n.size() != space.num_dofs())
   {
      throw std::invalid_argument("state vector size does not match the space");
   }
   SparseSystem system(space.num_dofs());
   const int threads = resolve_threads(options.threads);

   assemble_items(problem.mesh.num_cells(), threads, system.triplets, system.rhs,
                  [&](int c, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { cell_kernel(problem, space, u_n, s, c, t, r); });

   const std::vector<char> clamped = clamped_dofs(problem.mesh);
   std::erase_if(system.triplets,
                 [&](const Eigen::Triplet<double> &t)
                 { return clamped[t.row()] || clamped[t.col()]; });
   for (int i = 0; i < space.num_dofs(); ++i)
   {
      if (clamped[i])
      {
         system.add(i, i, 1.0);
         system.rhs[i] = 0.0;
      }
   }
   return system;
}

std::pair<Eigen::VectorXd, NewtonTrace>
newton_solve_elasticity(ElasticityProblem problem, ElasticityMethod method,
                        const NewtonConfig &config,
                        const ElasticityAssemblyOptions &options)
{
   require_3d(problem);
   if (config.gamma0 > 0.0)
   {
      problem.gamma0 = config.gamma0;
   }
   const FunctionSpace space(problem.mesh,
                             method == ElasticityMethod::DG ? SpaceKind::DG
                                                            : SpaceKind::CG,
                             1, 3);

   NewtonProblem newton;
   newton.num_dofs = space.num_dofs();
   newton.assemble = [&problem, method, &options](const Eigen::VectorXd &u, double s)
   {
      return method == ElasticityMethod::DG
                ? assemble_elasticity_dg(problem, u, s, options)
                : assemble_elasticity_cg(problem, u, s, options);
   };
   return newton_solve(newton, config);
}

ElasticityProblem load_case(const std::string &name, int n)
{
   if (n < 1)
   {
      throw std::invalid_argument("load_case needs n >= 1");
   }
   ElasticityProblem problem;
   problem.material = MooneyRivlinMaterial::from_moduli(200.0, 0.33);
   problem.gamma0 = 100.0 * 200.0; // 100 x Young's modulus

   if (name == "twist")
   {
      problem.mesh = box_mesh({1.0, 1.0, 1.0}, {n, n, n});
      problem.body_force = [](const Eigen::Vector3d &x) {
         return Eigen::Vector3d(0.0, 200.0 - 400.0 * x.z(), 400.0 * x.y() - 200.0);
      };
   }
   else if (name == "stretch")
   {
      problem.mesh = box_mesh({1.0, 1.0, 1.0}, {n, n, n});
      problem.body_force = [](const Eigen::Vector3d &) {
         return Eigen::Vector3d(250.0, 0.0, 0.0);
      };
   }
   else if (name == "bend")
   {
      problem.mesh = box_mesh({0.5, 0.1, 0.1}, {5 * n, n, n});
      problem.body_force = [](const Eigen::Vector3d &) {
         return Eigen::Vector3d(0.0, 0.0, -15.0);
      };
   }
   else
   {
      throw std::invalid_argument("unknown load case '" + name + "'");
   }
   return problem;
}

} // namespace dgn
