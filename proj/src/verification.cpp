#include "dgnewton/verification.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

namespace dgn
{

namespace
{

constexpr double kPi = 3.14159265358979323846;

// Quadrature positions and P1 values on one cell for a reference rule.
struct CellQuad
{
   std::vector<Eigen::Vector3d> x;
   std::vector<double> w;
   std::vector<std::array<double, 4>> lambda;
};

CellQuad cell_quadrature(const Mesh &mesh, int cell, int degree)
{
   const QuadratureRule rule = quadrature(mesh.dim, degree);
   const double measure = cell_measure(mesh, cell);
   const double ref = mesh.dim == 2 ? 0.5 : 1.0 / 6.0;
   const Eigen::Matrix<double, 3, 4> X = cell_coords(mesh, cell);

   CellQuad out;
   for (int q = 0; q < rule.size(); ++q)
   {
      const Eigen::Vector3d &p = rule.points[q];
      std::array<double, 4> lambda{};
      lambda[0] = 1.0 - p.x() - p.y() - (mesh.dim == 3 ? p.z() : 0.0);
      lambda[1] = p.x();
      lambda[2] = p.y();
      lambda[3] = mesh.dim == 3 ? p.z() : 0.0;
      Eigen::Vector3d x = Eigen::Vector3d::Zero();
      for (int a = 0; a <= mesh.dim; ++a)
      {
         x += lambda[a] * X.col(a);
      }
      out.x.push_back(x);
      out.w.push_back(rule.weights[q] * measure / ref);
      out.lambda.push_back(lambda);
   }
   return out;
}

std::string format_double(double v)
{
   char buf[32];
   auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
   return std::string(buf, ptr);
}

} // namespace

double error_l2(const FunctionSpace &space, const Eigen::VectorXd &u,
                const std::function<double(const Eigen::Vector3d &)> &exact)
{
   const Mesh &mesh = space.mesh();
   double err2 = 0.0;
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      const CellQuad quad = cell_quadrature(mesh, c, 4);
      for (size_t q = 0; q < quad.x.size(); ++q)
      {
         double uh = 0.0;
         for (int a = 0; a <= mesh.dim; ++a)
         {
            uh += u[space.dof(c, a)] * quad.lambda[q][a];
         }
         const double d = uh - exact(quad.x[q]);
         err2 += quad.w[q] * d * d;
      }
   }
   return std::sqrt(err2);
}

double error_h1_broken(
   const FunctionSpace &space, const Eigen::VectorXd &u,
   const std::function<Eigen::Vector3d(const Eigen::Vector3d &)> &exact_grad)
{
   const Mesh &mesh = space.mesh();
   double err2 = 0.0;
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      const Eigen::Vector3d gh = grad_scalar(space, u, c);
      const CellQuad quad = cell_quadrature(mesh, c, 4);
      for (size_t q = 0; q < quad.x.size(); ++q)
      {
         err2 += quad.w[q] * (gh - exact_grad(quad.x[q])).squaredNorm();
      }
   }
   return std::sqrt(err2);
}

double relative_l2_diff(const FunctionSpace &space_a, const Eigen::VectorXd &u_a,
                        const FunctionSpace &space_b, const Eigen::VectorXd &u_b)
{
   if (&space_a.mesh() != &space_b.mesh() ||
       space_a.value_dim() != space_b.value_dim())
   {
      throw std::invalid_argument("relative_l2_diff expects fields over the "
                                  "same mesh with equal value dimension");
   }
   const Mesh &mesh = space_a.mesh();
   const int vd = space_a.value_dim();
   double diff2 = 0.0, ref2 = 0.0;
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      const CellQuad quad = cell_quadrature(mesh, c, 4);
      for (size_t q = 0; q < quad.x.size(); ++q)
      {
         for (int k = 0; k < vd; ++k)
         {
            double va = 0.0, vb = 0.0;
            for (int a = 0; a <= mesh.dim; ++a)
            {
               va += u_a[space_a.dof(c, a, k)] * quad.lambda[q][a];
               vb += u_b[space_b.dof(c, a, k)] * quad.lambda[q][a];
            }
            diff2 += quad.w[q] * (va - vb) * (va - vb);
            ref2 += quad.w[q] * vb * vb;
         }
      }
   }
   const double num = std::sqrt(diff2);
   return ref2 > 0.0 ? num / std::sqrt(ref2) : num;
}

ScalarProblem poisson_mms_problem(int n, SpaceKind kind)
{
   ScalarProblem problem;
   problem.mesh = unit_square_mesh(n);
   problem.space = kind;
   problem.material = std::make_shared<ScalarLinearMaterial>(1.0);
   problem.source = [](const Eigen::Vector3d &x)
   { return 2.0 * kPi * kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
   problem.dirichlet = [](const Eigen::Vector3d &) { return 0.0; };
   return problem;
}

void ConvergenceStudy::write_csv(std::ostream &out) const
{
   out << "n,h,l2_error,h1_error,l2_rate,h1_rate\n";
   for (size_t i = 0; i < levels.size(); ++i)
   {
      out << levels[i] << ',' << format_double(h[i]) << ','
          << format_double(l2_error[i]) << ',' << format_double(h1_error[i])
          << ',' << format_double(l2_rate[i]) << ',' << format_double(h1_rate[i])
          << '\n';
   }
}

ConvergenceStudy poisson_mms(const std::vector<int> &levels, SpaceKind kind,
                             const AssemblyOptions &options)
{
   ConvergenceStudy study;
   const auto exact = [](const Eigen::Vector3d &x)
   { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
   const auto exact_grad = [](const Eigen::Vector3d &x)
   {
      return Eigen::Vector3d(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()),
                             kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()),
                             0.0);
   };

   for (const int n : levels)
   {
      const ScalarProblem problem = poisson_mms_problem(n, kind);
      const FunctionSpace space(problem.mesh, kind);
      const Eigen::VectorXd u =
         linear_solve(assemble_nitsche_linear(problem, options));
      study.levels.push_back(n);
      study.h.push_back(1.0 / n);
      study.l2_error.push_back(error_l2(space, u, exact));
      study.h1_error.push_back(error_h1_broken(space, u, exact_grad));
   }

   study.l2_rate.assign(levels.size(), 0.0);
   study.h1_rate.assign(levels.size(), 0.0);
   for (size_t i = 1; i < levels.size(); ++i)
   {
      const double ratio = std::log(study.h[i - 1] / study.h[i]);
      study.l2_rate[i] = std::log(study.l2_error[i - 1] / study.l2_error[i]) / ratio;
      study.h1_rate[i] = std::log(study.h1_error[i - 1] / study.h1_error[i]) / ratio;
   }
   return study;
}

PlasticityResult plasticity_case(int n, ScalarScheme scheme,
                                 const NewtonConfig &config,
                                 TractionAveraging averaging,
                                 const AssemblyOptions &options)
{
   PlasticityResult result;
   result.problem.mesh = unit_square_mesh(n);
   result.problem.space = SpaceKind::DG;
   result.problem.material = std::make_shared<AntiplaneShearMaterial>(1.0, 1.0);
   result.problem.source = [](const Eigen::Vector3d &x)
   { return 7.5 * std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
   result.problem.dirichlet = [](const Eigen::Vector3d &) { return 0.0; };
   result.problem.averaging = averaging;
   if (config.gamma0 > 0.0)
   {
      result.problem.gamma0 = config.gamma0;
   }

   auto [u, trace] = newton_solve_scalar(result.problem, scheme, config, options);
   result.u = std::move(u);
   result.trace = std::move(trace);

   const Mesh &mesh = result.problem.mesh;
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      result.states.push_back(scalar_cell_state(result.problem, result.u, c));
      result.max_stress_norm =
         std::max(result.max_stress_norm, result.states.back().stress.norm());
      result.plastic_cells += result.states.back().plastic ? 1 : 0;
   }

   // Mirror each dof across x1 = x2. Node positions sit on the 1/n lattice
   // and centroids on the 1/(3n) lattice, so integer keys are exact.
   const FunctionSpace space(mesh, result.problem.space);
   std::map<std::array<long, 4>, int> dof_at;
   auto key = [&](const Eigen::Vector3d &node, const Eigen::Vector3d &centroid)
   {
      return std::array<long, 4>{
         std::lround(node.x() * n), std::lround(node.y() * n),
         std::lround(centroid.x() * 3 * n), std::lround(centroid.y() * 3 * n)};
   };
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      const Eigen::Vector3d centroid = cell_centroid(mesh, c);
      for (int a = 0; a <= mesh.dim; ++a)
      {
         dof_at[key(mesh.vertices[mesh.cells[c][a]], centroid)] = space.dof(c, a);
      }
   }
   for (const auto &[k, dof] : dof_at)
   {
      const std::array<long, 4> mirrored{k[1], k[0], k[3], k[2]};
      result.symmetry_error = std::max(
         result.symmetry_error,
         std::abs(result.u[dof] - result.u[dof_at.at(mirrored)]));
   }
   return result;
}

std::vector<double> project_stress_to_vertices(const ScalarProblem &problem,
                                               const Eigen::VectorXd &u)
{
   const Mesh &mesh = problem.mesh;
   std::vector<double> stress(2 * mesh.num_vertices(), 0.0);
   std::vector<double> weight(mesh.num_vertices(), 0.0);
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      const ScalarCellState state = scalar_cell_state(problem, u, c);
      const double measure = cell_measure(mesh, c);
      for (int a = 0; a <= mesh.dim; ++a)
      {
         const int v = mesh.cells[c][a];
         stress[2 * v] += measure * state.stress.x();
         stress[2 * v + 1] += measure * state.stress.y();
         weight[v] += measure;
      }
   }
   for (int v = 0; v < mesh.num_vertices(); ++v)
   {
      if (weight[v] > 0.0)
      {
         stress[2 * v] /= weight[v];
         stress[2 * v + 1] /= weight[v];
      }
   }
   return stress;
}

HyperelasticResult hyperelastic_case(const std::string &name, int n,
                                     CaseMethod method, const NewtonConfig &config,
                                     const ElasticityAssemblyOptions &options)
{
   HyperelasticResult result;
   result.problem = load_case(name, n);
   if (config.gamma0 > 0.0)
   {
      result.problem.gamma0 = config.gamma0;
   }

   if (method != CaseMethod::CG)
   {
      auto [u, trace] =
         newton_solve_elasticity(result.problem, ElasticityMethod::DG, config,
                                 options);
      result.u_dg = std::move(u);
      result.trace_dg = std::move(trace);
   }
   if (method != CaseMethod::DG)
   {
      auto [u, trace] =
         newton_solve_elasticity(result.problem, ElasticityMethod::CG, config,
                                 options);
      result.u_cg = std::move(u);
      result.trace_cg = std::move(trace);
   }
   if (method == CaseMethod::Both)
   {
      const FunctionSpace dg(result.problem.mesh, SpaceKind::DG, 1, 3);
      const FunctionSpace cg(result.problem.mesh, SpaceKind::CG, 1, 3);
      result.dg_cg_l2_diff = relative_l2_diff(dg, result.u_dg, cg, result.u_cg);
   }
   return result;
}

} // namespace dgn
