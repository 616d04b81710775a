#include "dgnewton/dg_scalar.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "dgnewton/parallel.hpp"

namespace dgn
{

namespace
{

constexpr int kCellQuadDegree = 2;
constexpr int kFaceQuadDegree = 2;

void require_scalar_2d(const ScalarProblem &problem)
{
   if (problem.mesh.dim != 2)
   {
      throw std::invalid_argument("scalar assembly expects a 2D mesh");
   }
   if (!problem.material)
   {
      throw std::invalid_argument("scalar problem has no material");
   }
}

Eigen::Vector2d cell_grad(const FunctionSpace &space, const Eigen::VectorXd &u,
                          int cell)
{
   return grad_scalar(space, u, cell).head<2>();
}

// sigma and sigma' used on a face: one-sided on the boundary, averaged on
// interior faces per the averaging mode.
struct FaceLaw
{
   Eigen::Vector2d sigma;
   Eigen::Matrix2d tangent;
};

FaceLaw face_law(const ScalarMaterial &material, TractionAveraging averaging,
                 const Eigen::Vector2d &g_plus, const Eigen::Vector2d *g_minus)
{
   if (!g_minus)
   {
      return {material.stress(g_plus), material.tangent(g_plus)};
   }
   if (averaging == TractionAveraging::StressOfMean)
   {
      const Eigen::Vector2d g_bar = 0.5 * (g_plus + *g_minus);
      return {material.stress(g_bar), material.tangent(g_bar)};
   }
   return {0.5 * (material.stress(g_plus) + material.stress(*g_minus)),
           0.5 * (material.tangent(g_plus) + material.tangent(*g_minus))};
}

// Cell contribution: (sigma'(grad u_n) grad phi_b, grad phi_a)_T,
// -(sigma(grad u_n), grad phi_a)_T, and the load (s f, phi_a)_T.
void cell_kernel(const ScalarProblem &problem, const FunctionSpace &space,
                 const Eigen::VectorXd *u_n, double s, int c,
                 std::vector<Eigen::Triplet<double>> &triplets,
                 Eigen::VectorXd &rhs)
{
   const Mesh &mesh = problem.mesh;
   const double measure = cell_measure(mesh, c);
   const auto grads = basis_gradients(mesh, c);
   const int nn = mesh.nodes_per_cell();

   std::array<int, 4> dofs{};
   for (int a = 0; a < nn; ++a)
   {
      dofs[a] = space.dof(c, a);
   }

   Eigen::Vector2d g = Eigen::Vector2d::Zero();
   if (u_n)
   {
      for (int a = 0; a < nn; ++a)
      {
         g += (*u_n)[dofs[a]] * grads[a].head<2>();
      }
   }
   const Eigen::Matrix2d tangent = problem.material->tangent(g);

   for (int a = 0; a < nn; ++a)
   {
      const Eigen::Vector2d ta = tangent * grads[a].head<2>();
      for (int b = 0; b < nn; ++b)
      {
         triplets.emplace_back(dofs[b], dofs[a], measure * ta.dot(grads[b].head<2>()));
      }
   }

   if (u_n)
   {
      const Eigen::Vector2d sigma = problem.material->stress(g);
      for (int a = 0; a < nn; ++a)
      {
         rhs[dofs[a]] -= measure * sigma.dot(grads[a].head<2>());
      }
   }

   if (problem.source)
   {
      const QuadratureRule rule = quadrature(2, kCellQuadDegree);
      const Eigen::Matrix<double, 3, 4> X = cell_coords(mesh, c);
      for (int q = 0; q < rule.size(); ++q)
      {
         const double xi = rule.points[q].x(), eta = rule.points[q].y();
         const double lambda[3] = {1.0 - xi - eta, xi, eta};
         Eigen::Vector3d x = Eigen::Vector3d::Zero();
         for (int a = 0; a < nn; ++a)
         {
            x += lambda[a] * X.col(a);
         }
         const double w = rule.weights[q] * measure / 0.5;
         const double load = w * s * problem.source(x);
         for (int a = 0; a < nn; ++a)
         {
            rhs[dofs[a]] += load * lambda[a];
         }
      }
   }
}

struct FaceEntry
{
   int dof;
   double jump_sign;    // +1 on the plus side, -1 on the minus side
   double avg_factor;   // 1/2 on interior faces, 1 one-sided
   Eigen::Vector2d grad;
   int local;           // node index within its cell
   bool plus_side;
};

// Classical face contribution around state u_n (u_n == nullptr assembles
// the linear operator at zero state: matrix terms plus Dirichlet data).
void classical_face_kernel(const ScalarProblem &problem, const FunctionSpace &space,
                           const Eigen::VectorXd *u_n, double s, int f,
                           std::vector<Eigen::Triplet<double>> &triplets,
                           Eigen::VectorXd &rhs)
{
   const Mesh &mesh = problem.mesh;
   const Face &face = mesh.faces[f];
   const bool boundary = face.boundary();
   const bool dirichlet = boundary && mesh.tag(f) == "dirichlet";
   if (boundary && !dirichlet)
   {
      return;
   }
   if (space.kind() == SpaceKind::CG && !boundary)
   {
      return;
   }

   const int nn = mesh.nodes_per_cell();
   const int p = face.cell_plus;
   const auto grads_p = basis_gradients(mesh, p);

   Eigen::Vector2d g_plus = Eigen::Vector2d::Zero();
   Eigen::Vector2d g_minus = Eigen::Vector2d::Zero();
   if (u_n)
   {
      g_plus = cell_grad(space, *u_n, p);
   }

   std::vector<FaceEntry> entries;
   entries.reserve(2 * nn);
   const double avg = boundary ? 1.0 : 0.5;
   for (int a = 0; a < nn; ++a)
   {
      entries.push_back({space.dof(p, a), 1.0, avg, grads_p[a].head<2>(), a, true});
   }
   if (!boundary)
   {
      const int m = face.cell_minus;
      const auto grads_m = basis_gradients(mesh, m);
      if (u_n)
      {
         g_minus = cell_grad(space, *u_n, m);
      }
      for (int a = 0; a < nn; ++a)
      {
         entries.push_back({space.dof(m, a), -1.0, avg, grads_m[a].head<2>(), a, false});
      }
   }

   const FaceLaw law = face_law(*problem.material, problem.averaging, g_plus,
                                boundary ? nullptr : &g_minus);
   const Eigen::Vector2d n = face.normal.head<2>();
   const double n_sigma = n.dot(law.sigma);
   const double penalty = problem.gamma0 / face.h;

   const int ne = static_cast<int>(entries.size());
   std::vector<double> traction(ne);
   for (int e = 0; e < ne; ++e)
   {
      traction[e] = entries[e].avg_factor * n.dot(law.tangent * entries[e].grad);
   }

   std::vector<double> jump(ne);
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
         const double value = entries[e].plus_side ? basis_p.value[entries[e].local]
                                                   : basis_m.value[entries[e].local];
         jump[e] = entries[e].jump_sign * value;
      }

      for (int e = 0; e < ne; ++e)
      {
         for (int b = 0; b < ne; ++b)
         {
            // Trial side b, test side e: consistency, adjoint consistency,
            // penalty.
            const double value = -jump[e] * traction[b] - traction[e] * jump[b] +
                                 penalty * jump[e] * jump[b];
            triplets.emplace_back(entries[e].dof, entries[b].dof, w * value);
         }
      }

      double jump_u = 0.0;
      if (u_n)
      {
         for (int e = 0; e < ne; ++e)
         {
            jump_u += jump[e] * (*u_n)[entries[e].dof];
         }
      }
      if (dirichlet && problem.dirichlet)
      {
         jump_u -= s * problem.dirichlet(x);
      }

      for (int e = 0; e < ne; ++e)
      {
         double value = -jump_u * (penalty * jump[e] - traction[e]);
         if (u_n)
         {
            value += n_sigma * jump[e];
         }
         rhs[entries[e].dof] += w * value;
      }
   }
}

// Hybridized face contribution: one block per adjacent element, built from
// that element's own traction and per-element length scale.
void hybrid_face_kernel(const ScalarProblem &problem, const FunctionSpace &space,
                        const Eigen::VectorXd &u_n, double s, int f,
                        std::vector<Eigen::Triplet<double>> &triplets,
                        Eigen::VectorXd &rhs)
{
   const Mesh &mesh = problem.mesh;
   const Face &face = mesh.faces[f];
   const bool boundary = face.boundary();
   const bool dirichlet = boundary && mesh.tag(f) == "dirichlet";
   if (boundary && !dirichlet)
   {
      return;
   }
   if (space.kind() == SpaceKind::CG && !boundary)
   {
      return;
   }

   const int nn = mesh.nodes_per_cell();
   const auto qpts = face_quadrature(mesh, f, kFaceQuadDegree);

   const int nsides = boundary ? 1 : 2;
   for (int side = 0; side < nsides; ++side)
   {
      const int cell = side == 0 ? face.cell_plus : face.cell_minus;
      const int other = side == 0 ? face.cell_minus : face.cell_plus;
      const Eigen::Vector2d n =
         (side == 0 ? 1.0 : -1.0) * face.normal.head<2>();
      const double h_t = cell_measure(mesh, cell) / face.measure;
      const double penalty = problem.gamma0 / h_t;

      const auto grads = basis_gradients(mesh, cell);
      const Eigen::Vector2d g = cell_grad(space, u_n, cell);
      const Eigen::Vector2d sigma = problem.material->stress(g);
      const Eigen::Matrix2d tangent = problem.material->tangent(g);
      const double n_sigma = n.dot(sigma);

      // Test and trial functions enter through v_T - <v>: the element's own
      // nodes with weight 1/2 (1 on the boundary, where the mean is data)
      // and the neighbor's with weight -1/2.
      std::vector<FaceEntry> entries;
      entries.reserve(2 * nn);
      const double own = boundary ? 1.0 : 0.5;
      for (int a = 0; a < nn; ++a)
      {
         entries.push_back({space.dof(cell, a), own, 1.0, grads[a].head<2>(), a, true});
      }
      if (!boundary)
      {
         for (int a = 0; a < nn; ++a)
         {
            entries.push_back(
               {space.dof(other, a), -0.5, 1.0, Eigen::Vector2d::Zero(), a, false});
         }
      }

      const int ne = static_cast<int>(entries.size());
      std::vector<double> traction(ne);
      for (int e = 0; e < ne; ++e)
      {
         traction[e] = n.dot(tangent * entries[e].grad);
      }

      std::vector<double> weight(ne);
      for (const auto &[x, w] : qpts)
      {
         const CellBasis basis_own = basis_eval(mesh, cell, x);
         CellBasis basis_other;
         if (!boundary)
         {
            basis_other = basis_eval(mesh, other, x);
         }
         for (int e = 0; e < ne; ++e)
         {
            const double value = entries[e].plus_side
                                    ? basis_own.value[entries[e].local]
                                    : basis_other.value[entries[e].local];
            weight[e] = entries[e].jump_sign * value;
         }

         double w_n = 0.0;
         for (int e = 0; e < ne; ++e)
         {
            w_n += weight[e] * u_n[entries[e].dof];
         }
         if (dirichlet && problem.dirichlet)
         {
            w_n -= s * problem.dirichlet(x);
         }

         for (int e = 0; e < ne; ++e)
         {
            for (int b = 0; b < ne; ++b)
            {
               const double value = -weight[e] * traction[b] -
                                    traction[e] * weight[b] +
                                    penalty * weight[e] * weight[b];
               triplets.emplace_back(entries[e].dof, entries[b].dof, w * value);
            }
            rhs[entries[e].dof] +=
               w * (n_sigma * weight[e] - w_n * (penalty * weight[e] - traction[e]));
         }
      }
   }
}

} // namespace

SparseSystem assemble_nitsche_linear(const ScalarProblem &problem,
                                     const AssemblyOptions &options)
{
   require_scalar_2d(problem);
   const FunctionSpace space(problem.mesh, problem.space);
   SparseSystem system(space.num_dofs());
   const int threads = resolve_threads(options.threads);

   assemble_items(problem.mesh.num_cells(), threads, system.triplets, system.rhs,
                  [&](int c, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { cell_kernel(problem, space, nullptr, 1.0, c, t, r); });
   assemble_items(problem.mesh.num_faces(), threads, system.triplets, system.rhs,
                  [&](int f, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { classical_face_kernel(problem, space, nullptr, 1.0, f, t, r); });
   return system;
}

SparseSystem assemble_dg_classical(const ScalarProblem &problem,
                                   const Eigen::VectorXd &u_n, double s,
                                   const AssemblyOptions &options)
{
   require_scalar_2d(problem);
   const FunctionSpace space(problem.mesh, problem.space);
   if (u_n.size() != space.num_dofs())
   {
      throw std::invalid_argument("state vector size does not match the space");
   }
   SparseSystem system(space.num_dofs());
   const int threads = resolve_threads(options.threads);

   assemble_items(problem.mesh.num_cells(), threads, system.triplets, system.rhs,
                  [&](int c, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { cell_kernel(problem, space, &u_n, s, c, t, r); });
   assemble_items(problem.mesh.num_faces(), threads, system.triplets, system.rhs,
                  [&](int f, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { classical_face_kernel(problem, space, &u_n, s, f, t, r); });
   return system;
}

SparseSystem assemble_dg_hybrid(const ScalarProblem &problem,
                                const Eigen::VectorXd &u_n, double s,
                                const AssemblyOptions &options)
{
   require_scalar_2d(problem);
   const FunctionSpace space(problem.mesh, problem.space);
   if (u_n.size() != space.num_dofs())
   {
      throw std::invalid_argument("state vector size does not match the space");
   }
   SparseSystem system(space.num_dofs());
   const int threads = resolve_threads(options.threads);

   assemble_items(problem.mesh.num_cells(), threads, system.triplets, system.rhs,
                  [&](int c, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { cell_kernel(problem, space, &u_n, s, c, t, r); });
   assemble_items(problem.mesh.num_faces(), threads, system.triplets, system.rhs,
                  [&](int f, std::vector<Eigen::Triplet<double>> &t,
                      Eigen::VectorXd &r)
                  { hybrid_face_kernel(problem, space, u_n, s, f, t, r); });
   return system;
}

std::pair<Eigen::VectorXd, NewtonTrace>
newton_solve_scalar(ScalarProblem problem, ScalarScheme scheme,
                    const NewtonConfig &config, const AssemblyOptions &options)
{
   require_scalar_2d(problem);
   if (config.gamma0 > 0.0)
   {
      problem.gamma0 = config.gamma0;
   }
   const FunctionSpace space(problem.mesh, problem.space);

   NewtonProblem newton;
   newton.num_dofs = space.num_dofs();
   newton.assemble = [&problem, scheme, &options](const Eigen::VectorXd &u, double s)
   {
      return scheme == ScalarScheme::Classical
                ? assemble_dg_classical(problem, u, s, options)
                : assemble_dg_hybrid(problem, u, s, options);
   };
   return newton_solve(newton, config);
}

ScalarCellState scalar_cell_state(const ScalarProblem &problem,
                                  const Eigen::VectorXd &u, int cell)
{
   require_scalar_2d(problem);
   const FunctionSpace space(problem.mesh, problem.space);
   ScalarCellState state;
   state.grad = cell_grad(space, u, cell);
   state.stress = problem.material->stress(state.grad);
   state.tangent = problem.material->tangent(state.grad);
   state.plastic = problem.material->plastic(state.grad);
   return state;
}

std::vector<double>
estimate_inverse_constant(const Mesh &mesh,
                          const std::vector<Eigen::Matrix2d> &cell_tangents)
{
   if (mesh.dim != 2)
   {
      throw std::invalid_argument("estimate_inverse_constant expects a 2D mesh");
   }
   if (static_cast<int>(cell_tangents.size()) != mesh.num_cells())
   {
      throw std::invalid_argument("one tangent per cell required");
   }

   std::vector<std::vector<int>> cell_faces(mesh.num_cells());
   for (int f = 0; f < mesh.num_faces(); ++f)
   {
      cell_faces[mesh.faces[f].cell_plus].push_back(f);
      if (!mesh.faces[f].boundary())
      {
         cell_faces[mesh.faces[f].cell_minus].push_back(f);
      }
   }

   std::vector<double> constants(mesh.num_cells());
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      const Eigen::Matrix2d &tangent = cell_tangents[c];
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> spd(tangent);
      if (!(spd.eigenvalues().minCoeff() > 0.0))
      {
         constants[c] = std::numeric_limits<double>::infinity();
         continue;
      }
      const double measure = cell_measure(mesh, c);
      Eigen::Matrix2d face_form = Eigen::Matrix2d::Zero();
      for (const int f : cell_faces[c])
      {
         const double h_t = measure / mesh.faces[f].measure;
         face_form += h_t * mesh.faces[f].measure * tangent;
      }
      const Eigen::Matrix2d volume_form = measure * tangent;
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> eig(face_form,
                                                                    volume_form);
      constants[c] = eig.eigenvalues().maxCoeff();
   }
   return constants;
}

} // namespace dgn
