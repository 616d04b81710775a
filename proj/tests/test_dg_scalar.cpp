#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include <dgnewton/dg_scalar.hpp>
#include <dgnewton/fem.hpp>
#include <dgnewton/mesh.hpp>
#include <dgnewton/solver.hpp>

using namespace dgn;

namespace
{

ScalarProblem make_problem(int n, double k = 1.0)
{
   ScalarProblem problem;
   problem.mesh = unit_square_mesh(n);
   problem.material = std::make_shared<ScalarLinearMaterial>(k);
   problem.source = [](const Eigen::Vector3d &) { return 0.0; };
   problem.dirichlet = [](const Eigen::Vector3d &) { return 0.0; };
   problem.gamma0 = 100.0 * k;
   return problem;
}

ScalarProblem make_antiplane_problem(int n, double yield)
{
   ScalarProblem problem;
   problem.mesh = unit_square_mesh(n);
   problem.material = std::make_shared<AntiplaneShearMaterial>(1.0, yield);
   problem.source = [](const Eigen::Vector3d &) { return 0.0; };
   problem.dirichlet = [](const Eigen::Vector3d &) { return 0.0; };
   problem.gamma0 = 100.0;
   return problem;
}

Eigen::VectorXd random_state(int n, unsigned seed)
{
   std::mt19937 rng(seed);
   std::uniform_real_distribution<double> dist(-0.5, 0.5);
   Eigen::VectorXd u(n);
   for (int i = 0; i < n; ++i)
   {
      u[i] = dist(rng);
   }
   return u;
}

Eigen::VectorXd interpolate(const FunctionSpace &cg,
                            const std::function<double(const Eigen::Vector3d &)> &f)
{
   const Mesh &mesh = cg.mesh();
   Eigen::VectorXd u(cg.num_dofs());
   for (int v = 0; v < mesh.num_vertices(); ++v)
   {
      u[v] = f(mesh.vertices[v]);
   }
   return u;
}

double max_abs_diff(const SparseSystem &a, const SparseSystem &b)
{
   const Eigen::MatrixXd diff =
      Eigen::MatrixXd(a.matrix()) - Eigen::MatrixXd(b.matrix());
   return diff.cwiseAbs().maxCoeff();
}

void retag_boundary(Mesh &mesh, const std::string &tag)
{
   for (auto &[face, old] : mesh.boundary_tags)
   {
      old = tag;
   }
}

} // namespace

TEST_CASE("linear patch solution is exact for every scheme")
{
   auto affine = [](const Eigen::Vector3d &x) { return 2.0 * x[0] - x[1] + 0.5; };

   ScalarProblem problem = make_problem(3, 2.0);
   problem.dirichlet = affine;

   const FunctionSpace dg(problem.mesh, SpaceKind::DG);
   const FunctionSpace cg(problem.mesh, SpaceKind::CG);
   const Eigen::VectorXd exact =
      inject_cg_into_dg(cg, dg, interpolate(cg, affine));

   const Eigen::VectorXd direct = linear_solve(assemble_nitsche_linear(problem));
   CHECK((direct - exact).lpNorm<Eigen::Infinity>() < 1e-10);

   auto [u_classical, t1] = newton_solve_scalar(problem, ScalarScheme::Classical);
   CHECK(t1.converged);
   CHECK((u_classical - exact).lpNorm<Eigen::Infinity>() < 1e-10);

   auto [u_hybrid, t2] = newton_solve_scalar(problem, ScalarScheme::Hybrid);
   CHECK(t2.converged);
   CHECK((u_hybrid - exact).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("penalty diagonal on the two-triangle square")
{
   // Conductivity zero isolates the penalty. Hand-computed entries for the
   // dof of the corner node (0, 0): interior diagonal face has
   // 1/h = 2 sqrt(2) and integral of the squared hat trace sqrt(2)/3,
   // boundary bottom edge has 1/h = 2 and integral 1/3. With gamma0 = 3:
   //   face-averaged jumps:  gamma0 (4/3 + 2/3) = 6
   //   element-owned jumps:  gamma0 (2/3 + 2/3) = 4, quarter-weighted on
   //                         interior faces from the half jump per side.
   ScalarProblem problem = make_problem(1, 1.0);
   problem.material = std::make_shared<ScalarLinearMaterial>(0.0);
   problem.gamma0 = 3.0;

   const FunctionSpace dg(problem.mesh, SpaceKind::DG);
   int dof = -1;
   for (int node = 0; node < 3; ++node)
   {
      if (problem.mesh.vertices[problem.mesh.cells[0][node]].norm() == 0.0)
      {
         dof = dg.dof(0, node);
      }
   }
   REQUIRE(dof >= 0);

   const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dg.num_dofs());
   const auto classical = assemble_dg_classical(problem, zero).matrix();
   const auto hybrid = assemble_dg_hybrid(problem, zero).matrix();
   CHECK(classical.coeff(dof, dof) == doctest::Approx(6.0).epsilon(1e-12));
   CHECK(hybrid.coeff(dof, dof) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("linear problems converge in one newton iteration")
{
   ScalarProblem problem = make_problem(4, 3.0);
   problem.source = [](const Eigen::Vector3d &x) { return 1.0 + x[0]; };
   problem.dirichlet = [](const Eigen::Vector3d &x)
   {
      return x[0] * x[0] - x[1];
   };

   const Eigen::VectorXd direct = linear_solve(assemble_nitsche_linear(problem));

   for (auto averaging :
        {TractionAveraging::StressOfMean, TractionAveraging::MeanOfStress})
   {
      problem.averaging = averaging;
      auto [u, trace] = newton_solve_scalar(problem, ScalarScheme::Classical);
      CHECK(trace.converged);
      CHECK(trace.total_iterations == 1);
      CHECK((u - direct).lpNorm<Eigen::Infinity>() <
            1e-12 * direct.lpNorm<Eigen::Infinity>());
   }
}

TEST_CASE("tangents are symmetric at random states")
{
   for (bool plastic_material : {false, true})
   {
      ScalarProblem problem = plastic_material ? make_antiplane_problem(3, 0.4)
                                               : make_problem(3, 2.0);
      const FunctionSpace dg(problem.mesh, SpaceKind::DG);
      const Eigen::VectorXd u = random_state(dg.num_dofs(), 11);

      CHECK(symmetry_defect(assemble_nitsche_linear(problem).matrix()) < 1e-12);
      CHECK(symmetry_defect(assemble_dg_hybrid(problem, u).matrix()) < 1e-12);
      for (auto averaging :
           {TractionAveraging::StressOfMean, TractionAveraging::MeanOfStress})
      {
         problem.averaging = averaging;
         CHECK(symmetry_defect(assemble_dg_classical(problem, u).matrix()) <
               1e-12);
      }

      problem.space = SpaceKind::CG;
      const FunctionSpace cg(problem.mesh, SpaceKind::CG);
      const Eigen::VectorXd u_cg = random_state(cg.num_dofs(), 12);
      CHECK(symmetry_defect(assemble_nitsche_linear(problem).matrix()) < 1e-12);
      CHECK(symmetry_defect(assemble_dg_classical(problem, u_cg).matrix()) <
            1e-12);
      CHECK(symmetry_defect(assemble_dg_hybrid(problem, u_cg).matrix()) < 1e-12);
   }
}

TEST_CASE("traction averaging is irrelevant for a linear law")
{
   ScalarProblem problem = make_problem(3, 2.5);
   const FunctionSpace dg(problem.mesh, SpaceKind::DG);
   const Eigen::VectorXd u = random_state(dg.num_dofs(), 21);

   problem.averaging = TractionAveraging::StressOfMean;
   const SparseSystem a = assemble_dg_classical(problem, u);
   problem.averaging = TractionAveraging::MeanOfStress;
   const SparseSystem b = assemble_dg_classical(problem, u);

   const double scale = Eigen::MatrixXd(a.matrix()).cwiseAbs().maxCoeff();
   CHECK(max_abs_diff(a, b) < 1e-13 * scale);
   CHECK((a.rhs - b.rhs).lpNorm<Eigen::Infinity>() <
         1e-13 * a.rhs.lpNorm<Eigen::Infinity>());
}

TEST_CASE("traction averaging matters past the yield surface")
{
   // Jumpy state with per-side gradients straddling the yield surface:
   // stress of the mean gradient and mean of the one-sided stresses differ.
   ScalarProblem problem = make_antiplane_problem(2, 0.2);
   const FunctionSpace dg(problem.mesh, SpaceKind::DG);
   const Eigen::VectorXd u = random_state(dg.num_dofs(), 31);

   problem.averaging = TractionAveraging::StressOfMean;
   const SparseSystem a = assemble_dg_classical(problem, u);
   problem.averaging = TractionAveraging::MeanOfStress;
   const SparseSystem b = assemble_dg_classical(problem, u);

   const double scale = Eigen::MatrixXd(a.matrix()).cwiseAbs().maxCoeff();
   CHECK(max_abs_diff(a, b) > 1e-6 * scale);
   CHECK((a.rhs - b.rhs).lpNorm<Eigen::Infinity>() >
         1e-6 * a.rhs.lpNorm<Eigen::Infinity>());
}

TEST_CASE("element-owned and face-averaged schemes coincide on a continuous space")
{
   ScalarProblem problem = make_antiplane_problem(3, 0.3);
   problem.space = SpaceKind::CG;
   problem.source = [](const Eigen::Vector3d &x) { return x[1]; };

   const FunctionSpace cg(problem.mesh, SpaceKind::CG);
   const Eigen::VectorXd u = random_state(cg.num_dofs(), 41);

   const SparseSystem classical = assemble_dg_classical(problem, u);
   const SparseSystem hybrid = assemble_dg_hybrid(problem, u);

   const double scale = Eigen::MatrixXd(classical.matrix()).cwiseAbs().maxCoeff();
   CHECK(max_abs_diff(classical, hybrid) < 1e-13 * scale);
   CHECK((classical.rhs - hybrid.rhs).lpNorm<Eigen::Infinity>() <
         1e-13 * (1.0 + classical.rhs.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("residual at a jump-free state does not see the penalty")
{
   // Without Dirichlet faces the penalty acts on interior jumps only, so a
   // state injected from the continuous space leaves no trace of gamma0 in
   // the residual. The tangent keeps its penalty rows.
   ScalarProblem problem = make_antiplane_problem(3, 0.3);
   retag_boundary(problem.mesh, "free");
   problem.source = [](const Eigen::Vector3d &x) { return std::sin(x[0]); };

   const FunctionSpace cg(problem.mesh, SpaceKind::CG);
   const FunctionSpace dg(problem.mesh, SpaceKind::DG);
   const Eigen::VectorXd u =
      inject_cg_into_dg(cg, dg, random_state(cg.num_dofs(), 51));

   problem.gamma0 = 1.0;
   const SparseSystem low = assemble_dg_classical(problem, u);
   problem.gamma0 = 1e6;
   const SparseSystem high = assemble_dg_classical(problem, u);

   // Injected jumps are zero only to machine precision, and the penalty
   // amplifies that roundoff by gamma0 / h. Bound the residual difference
   // by roundoff times the high-penalty matrix scale; a real jump would
   // contribute at the full matrix scale instead.
   const double penalty_scale =
      Eigen::MatrixXd(high.matrix()).cwiseAbs().maxCoeff();
   CHECK((low.rhs - high.rhs).lpNorm<Eigen::Infinity>() <
         1e-13 * penalty_scale);
   CHECK(max_abs_diff(low, high) >
         1.0 * Eigen::MatrixXd(low.matrix()).cwiseAbs().maxCoeff());
}

TEST_CASE("zero source and free boundary assemble a zero residual")
{
   ScalarProblem problem = make_problem(2);
   retag_boundary(problem.mesh, "free");
   const FunctionSpace dg(problem.mesh, SpaceKind::DG);
   const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dg.num_dofs());

   CHECK(assemble_dg_classical(problem, zero).rhs.norm() == 0.0);
   CHECK(assemble_dg_hybrid(problem, zero).rhs.norm() == 0.0);
}

TEST_CASE("inverse estimate constant equals the face count")
{
   const Mesh mesh = unit_square_mesh(2);

   Eigen::Matrix2d spd;
   spd << 2.0, 0.3, 0.3, 1.0;
   const std::vector<Eigen::Matrix2d> tangents(mesh.num_cells(), spd);
   for (double c : estimate_inverse_constant(mesh, tangents))
   {
      CHECK(c == doctest::Approx(3.0).epsilon(1e-9));
   }

   // Rank-one tangent: gradients in the kernel make the estimate unbounded.
   const Eigen::Vector2d v(1.0, 2.0);
   const std::vector<Eigen::Matrix2d> singular(mesh.num_cells(),
                                               v * v.transpose());
   for (double c : estimate_inverse_constant(mesh, singular))
   {
      CHECK(std::isinf(c));
   }
}

TEST_CASE("penalty below the inverse constant loses definiteness")
{
   ScalarProblem problem = make_problem(3, 1.0);
   problem.source = [](const Eigen::Vector3d &) { return 1.0; };

   SolveOptions opts;
   opts.require_spd = true;

   problem.gamma0 = 0.3; // a tenth of the inverse estimate constant
   CHECK_THROWS_AS(linear_solve(assemble_nitsche_linear(problem), opts),
                   SolveError);

   problem.gamma0 = 100.0;
   const SparseSystem system = assemble_nitsche_linear(problem);
   CHECK_NOTHROW(linear_solve(system, opts));

   const Eigen::MatrixXd dense = Eigen::MatrixXd(system.matrix());
   const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (dense + dense.transpose()));
   CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("cell state reports gradient, stress, and yield")
{
   auto affine = [](const Eigen::Vector3d &x) { return 2.0 * x[0] + 3.0 * x[1]; };

   ScalarProblem problem = make_problem(2, 2.0);
   const FunctionSpace cg(problem.mesh, SpaceKind::CG);
   const FunctionSpace dg(problem.mesh, SpaceKind::DG);
   const Eigen::VectorXd u = inject_cg_into_dg(cg, dg, interpolate(cg, affine));

   for (int cell = 0; cell < problem.mesh.num_cells(); ++cell)
   {
      const ScalarCellState state = scalar_cell_state(problem, u, cell);
      CHECK((state.grad - Eigen::Vector2d(2.0, 3.0)).norm() < 1e-12);
      CHECK((state.stress - Eigen::Vector2d(4.0, 6.0)).norm() < 1e-12);
      CHECK((state.tangent - 2.0 * Eigen::Matrix2d::Identity()).norm() < 1e-12);
      CHECK_FALSE(state.plastic);
   }

   ScalarProblem plastic = make_antiplane_problem(2, 1.0);
   plastic.mesh = problem.mesh;
   const ScalarCellState state = scalar_cell_state(plastic, u, 0);
   CHECK(state.plastic);
   CHECK(state.stress.norm() == doctest::Approx(1.0).epsilon(1e-12));
   CHECK((state.stress * std::sqrt(13.0) - Eigen::Vector2d(2.0, 3.0)).norm() <
         1e-12);
}

TEST_CASE("config penalty override replaces the problem penalty")
{
   ScalarProblem problem = make_problem(3, 1.0);
   problem.source = [](const Eigen::Vector3d &x) { return x[0] * x[1]; };

   NewtonConfig config;
   auto [u_default, t1] = newton_solve_scalar(problem, ScalarScheme::Classical,
                                              config);

   problem.gamma0 = 7.0;
   config.gamma0 = 100.0;
   auto [u_override, t2] = newton_solve_scalar(problem, ScalarScheme::Classical,
                                               config);
   CHECK(u_default == u_override);
}

TEST_CASE("plastic zones solve and respect the stress bound")
{
   // Peak forcing 7.5 drives the center past yield while staying below the
   // collapse load of the unit square.
   ScalarProblem problem = make_antiplane_problem(4, 1.0);
   problem.source = [](const Eigen::Vector3d &x)
   {
      constexpr double pi = 3.14159265358979323846;
      return 7.5 * std::sin(pi * x[0]) * std::sin(pi * x[1]);
   };

   auto [u, trace] = newton_solve_scalar(problem, ScalarScheme::Hybrid);
   CHECK(trace.converged);
   CHECK(trace.max_symmetry_defect < 1e-12);

   int plastic_cells = 0;
   for (int cell = 0; cell < problem.mesh.num_cells(); ++cell)
   {
      const ScalarCellState state = scalar_cell_state(problem, u, cell);
      plastic_cells += state.plastic;
      CHECK(state.stress.norm() <= 1.0 + 1e-8);
   }
   CHECK(plastic_cells > 0);
}
