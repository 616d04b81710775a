#include <doctest.h>

#include <cmath>
#include <random>

#include <dgnewton/dg_elasticity.hpp>
#include <dgnewton/fem.hpp>
#include <dgnewton/mesh.hpp>
#include <dgnewton/solver.hpp>

using namespace dgn;

namespace
{

ElasticityProblem small_problem()
{
   ElasticityProblem problem;
   problem.mesh = box_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
   problem.body_force = [](const Eigen::Vector3d &x)
   {
      return Eigen::Vector3d(10.0 * x.x(), -5.0, 2.0 * x.y());
   };
   return problem;
}

Eigen::VectorXd random_vector(int n, unsigned seed, double scale)
{
   std::mt19937 rng(seed);
   std::uniform_real_distribution<double> dist(-scale, scale);
   Eigen::VectorXd u(n);
   for (int i = 0; i < n; ++i)
   {
      u[i] = dist(rng);
   }
   return u;
}

// Smooth displacement that vanishes on the clamped X = 0 plane, sampled at
// the vertices and injected into the DG layout: continuous across interior
// faces and jump-free against the zero clamp data.
Eigen::VectorXd injected_state(const Mesh &mesh)
{
   const FunctionSpace cg(mesh, SpaceKind::CG, 1, 3);
   const FunctionSpace dg(mesh, SpaceKind::DG, 1, 3);
   Eigen::VectorXd u_cg(cg.num_dofs());
   for (int v = 0; v < mesh.num_vertices(); ++v)
   {
      const Eigen::Vector3d &x = mesh.vertices[v];
      u_cg[3 * v + 0] = 0.05 * x.x() * std::cos(x.y());
      u_cg[3 * v + 1] = 0.04 * x.x() * x.z();
      u_cg[3 * v + 2] = 0.03 * x.x() * std::sin(x.x() + x.z());
   }
   return inject_cg_into_dg(cg, dg, u_cg);
}

} // namespace

TEST_CASE("tangent is symmetric at rest and at a deformed state")
{
   const ElasticityProblem problem = small_problem();
   const FunctionSpace dg(problem.mesh, SpaceKind::DG, 1, 3);

   const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dg.num_dofs());
   CHECK(symmetry_defect(assemble_dg_tangent(problem, zero)) < 1e-12);
   CHECK(symmetry_defect(assemble_elasticity_cg(problem, Eigen::VectorXd::Zero(
                            3 * problem.mesh.num_vertices())).matrix()) < 1e-12);

   const Eigen::VectorXd u = random_vector(dg.num_dofs(), 5, 0.02);
   CHECK(symmetry_defect(assemble_dg_tangent(problem, u)) < 1e-12);
}

TEST_CASE("step system splits into the published tangent and residual")
{
   const ElasticityProblem problem = small_problem();
   const FunctionSpace dg(problem.mesh, SpaceKind::DG, 1, 3);
   const Eigen::VectorXd u = injected_state(problem.mesh);

   const SparseSystem system = assemble_elasticity_dg(problem, u, 0.7);
   const Eigen::SparseMatrix<double> K = assemble_dg_tangent(problem, u);
   const Eigen::VectorXd r = assemble_dg_residual(problem, u, 0.7);

   CHECK((Eigen::MatrixXd(system.matrix()) - Eigen::MatrixXd(K))
            .cwiseAbs()
            .maxCoeff() == 0.0);
   CHECK((system.rhs - r).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("residual vanishes at rest under zero load")
{
   const ElasticityProblem problem = small_problem();
   const FunctionSpace dg(problem.mesh, SpaceKind::DG, 1, 3);
   const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dg.num_dofs());

   CHECK(assemble_dg_residual(problem, zero, 0.0).norm() == 0.0);

   // At full load only the body force remains.
   const Eigen::VectorXd r = assemble_dg_residual(problem, zero, 1.0);
   CHECK(r.norm() > 0.0);
}

TEST_CASE("tangent matches the residual derivative at jump-free states")
{
   const ElasticityProblem problem = small_problem();
   const FunctionSpace dg(problem.mesh, SpaceKind::DG, 1, 3);

   const Eigen::VectorXd delta = random_vector(dg.num_dofs(), 17, 1.0);
   const double h = 1e-6;

   for (int which = 0; which < 2; ++which)
   {
      const Eigen::VectorXd u = which == 0
                                   ? Eigen::VectorXd::Zero(dg.num_dofs())
                                   : injected_state(problem.mesh);

      const Eigen::SparseMatrix<double> K = assemble_dg_tangent(problem, u);
      const Eigen::VectorXd r_plus =
         assemble_dg_residual(problem, u + h * delta);
      const Eigen::VectorXd r_minus =
         assemble_dg_residual(problem, u - h * delta);
      const Eigen::VectorXd fd = (r_plus - r_minus) / (2.0 * h);
      const Eigen::VectorXd exact = -(K * delta);
      CHECK((fd - exact).norm() < 1e-5 * exact.norm());
   }
}

TEST_CASE("tangent is positive definite at rest")
{
   const ElasticityProblem problem = small_problem();
   const FunctionSpace dg(problem.mesh, SpaceKind::DG, 1, 3);

   SparseSystem system =
      assemble_elasticity_dg(problem, Eigen::VectorXd::Zero(dg.num_dofs()));
   SolveOptions opts;
   opts.require_spd = true;
   CHECK_NOTHROW(linear_solve(system, opts));

   SparseSystem cg_system = assemble_elasticity_cg(
      problem, Eigen::VectorXd::Zero(3 * problem.mesh.num_vertices()));
   CHECK_NOTHROW(linear_solve(cg_system, opts));
}

TEST_CASE("clamp eliminates the X = 0 vertex dofs")
{
   const Mesh mesh = box_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
   const std::vector<char> clamped = clamped_dofs(mesh);
   REQUIRE(clamped.size() == static_cast<size_t>(3 * mesh.num_vertices()));

   int count = 0;
   for (int v = 0; v < mesh.num_vertices(); ++v)
   {
      const bool on_plane = mesh.vertices[v].x() == 0.0;
      for (int c = 0; c < 3; ++c)
      {
         CHECK(static_cast<bool>(clamped[3 * v + c]) == on_plane);
      }
      count += on_plane ? 3 : 0;
   }
   CHECK(count == 27); // 3 x 3 vertex grid on the clamped plane, 3 components
}

TEST_CASE("conforming rows at clamped dofs are identity rows")
{
   ElasticityProblem problem = small_problem();
   const int n = 3 * problem.mesh.num_vertices();
   const std::vector<char> clamped = clamped_dofs(problem.mesh);

   Eigen::VectorXd u = random_vector(n, 23, 0.02);
   for (int i = 0; i < n; ++i)
   {
      if (clamped[i])
      {
         u[i] = 0.0;
      }
   }

   const SparseSystem system = assemble_elasticity_cg(problem, u);
   const Eigen::MatrixXd K = Eigen::MatrixXd(system.matrix());
   for (int i = 0; i < n; ++i)
   {
      if (!clamped[i])
      {
         continue;
      }
      CHECK(system.rhs[i] == 0.0);
      CHECK(K(i, i) == 1.0);
      CHECK(K.row(i).cwiseAbs().sum() == 1.0);
      CHECK(K.col(i).cwiseAbs().sum() == 1.0);
   }
}

TEST_CASE("load cases pin mesh, force, and penalty")
{
   CHECK_THROWS_AS(load_case("squeeze", 2), std::invalid_argument);
   CHECK_THROWS_AS(load_case("twist", 0), std::invalid_argument);

   const ElasticityProblem twist = load_case("twist", 2);
   CHECK(twist.mesh.num_cells() == 48);
   CHECK(twist.gamma0 == 20000.0);
   CHECK(twist.body_force(Eigen::Vector3d(0.3, 0.5, 0.5)).norm() == 0.0);
   CHECK((twist.body_force(Eigen::Vector3d(0.0, 1.0, 0.0)) -
          Eigen::Vector3d(0.0, 200.0, 200.0))
            .norm() < 1e-12);

   const ElasticityProblem stretch = load_case("stretch", 1);
   CHECK((stretch.body_force(Eigen::Vector3d(0.2, 0.9, 0.4)) -
          Eigen::Vector3d(250.0, 0.0, 0.0))
            .norm() == 0.0);

   const ElasticityProblem bend = load_case("bend", 1);
   CHECK(bend.mesh.num_cells() == 30);
   double volume = 0.0;
   for (int c = 0; c < bend.mesh.num_cells(); ++c)
   {
      volume += cell_measure(bend.mesh, c);
   }
   CHECK(volume == doctest::Approx(0.005).epsilon(1e-12));
   CHECK((bend.body_force(Eigen::Vector3d(0.1, 0.0, 0.1)) -
          Eigen::Vector3d(0.0, 0.0, -15.0))
            .norm() == 0.0);

   // Shared setup: E = 200, nu = 0.33.
   const double mu = 200.0 / (2.0 * 1.33);
   CHECK(twist.material.mu1() == doctest::Approx(mu / 2.0).epsilon(1e-14));
   CHECK(twist.material.bulk() ==
         doctest::Approx(200.0 / (3.0 * (1.0 - 0.66))).epsilon(1e-14));
}

TEST_CASE("inverted configurations are rejected with the offending cell")
{
   const ElasticityProblem problem = small_problem();
   const FunctionSpace dg(problem.mesh, SpaceKind::DG, 1, 3);

   // u1 = -2 X collapses F to diag(-1, 1, 1) in every cell.
   Eigen::VectorXd u = Eigen::VectorXd::Zero(dg.num_dofs());
   for (int c = 0; c < problem.mesh.num_cells(); ++c)
   {
      for (int a = 0; a < 4; ++a)
      {
         const Eigen::Vector3d &x =
            problem.mesh.vertices[problem.mesh.cells[c][a]];
         u[dg.dof(c, a, 0)] = -2.0 * x.x();
      }
   }

   bool thrown = false;
   try
   {
      assemble_dg_residual(problem, u);
   }
   catch (const InvertedElementError &err)
   {
      thrown = true;
      CHECK(err.cell >= 0);
      CHECK(err.det_f < 0.0);
   }
   CHECK(thrown);
}

TEST_CASE("newton solves the coarse twist case with both methods")
{
   const ElasticityProblem problem = load_case("twist", 1);

   NewtonConfig config;
   config.load_steps = 5;

   auto [u_dg, t_dg] = newton_solve_elasticity(problem, ElasticityMethod::DG,
                                               config);
   CHECK(t_dg.converged);
   CHECK(t_dg.max_symmetry_defect < 1e-12);
   CHECK(u_dg.lpNorm<Eigen::Infinity>() > 1e-3);
   CHECK(u_dg.lpNorm<Eigen::Infinity>() < 1.0);

   auto [u_cg, t_cg] = newton_solve_elasticity(problem, ElasticityMethod::CG,
                                               config);
   CHECK(t_cg.converged);
   CHECK(t_cg.max_symmetry_defect < 1e-12);

   // Clamped dofs stay put.
   const std::vector<char> clamped = clamped_dofs(problem.mesh);
   for (size_t i = 0; i < clamped.size(); ++i)
   {
      if (clamped[i])
      {
         CHECK(u_cg[static_cast<int>(i)] == 0.0);
      }
   }
}

TEST_CASE("config penalty override replaces the problem penalty")
{
   ElasticityProblem problem = load_case("stretch", 1);
   NewtonConfig config;
   config.load_steps = 4;

   auto [u_default, t1] =
      newton_solve_elasticity(problem, ElasticityMethod::DG, config);

   problem.gamma0 = 123.0;
   config.gamma0 = 20000.0;
   auto [u_override, t2] =
      newton_solve_elasticity(problem, ElasticityMethod::DG, config);
   CHECK(u_default == u_override);
}
