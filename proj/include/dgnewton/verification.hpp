#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dgnewton/dg_elasticity.hpp"
#include "dgnewton/dg_scalar.hpp"

namespace dgn
{

// L2 error of a P1 field against an exact solution, degree-4 quadrature.
double error_l2(const FunctionSpace &space, const Eigen::VectorXd &u,
                const std::function<double(const Eigen::Vector3d &)> &exact);

// Broken H1 seminorm error: cell-wise gradient against the exact gradient.
double error_h1_broken(
   const FunctionSpace &space, const Eigen::VectorXd &u,
   const std::function<Eigen::Vector3d(const Eigen::Vector3d &)> &exact_grad);

// Relative L2 distance between two vector fields on the same mesh,
// normalized by the L2 norm of the second field.
double relative_l2_diff(const FunctionSpace &space_a, const Eigen::VectorXd &u_a,
                        const FunctionSpace &space_b, const Eigen::VectorXd &u_b);

// Manufactured Poisson problem on the unit square:
// u = sin(pi x) sin(pi y), k = 1, f = 2 pi^2 u, homogeneous Dirichlet data.
ScalarProblem poisson_mms_problem(int n, SpaceKind kind);

struct ConvergenceStudy
{
   std::vector<int> levels;
   std::vector<double> h;
   std::vector<double> l2_error;
   std::vector<double> h1_error;
   std::vector<double> l2_rate; // between consecutive levels, front entry 0
   std::vector<double> h1_rate;

   void write_csv(std::ostream &out) const;
};

// Solves the manufactured problem once per level with the linear interior
// penalty operator and reports errors and observed rates.
ConvergenceStudy poisson_mms(const std::vector<int> &levels,
                             SpaceKind kind = SpaceKind::DG,
                             const AssemblyOptions &options = {});

// Antiplane shear plasticity on the unit square: G = 1, sigma_y = 1,
// f = 15/2 sin(pi x1) sin(pi x2), u = 0 on the boundary, penalty from
// config.gamma0 (default 100 G).
struct PlasticityResult
{
   ScalarProblem problem;
   Eigen::VectorXd u;
   NewtonTrace trace;
   std::vector<ScalarCellState> states; // per cell
   double max_stress_norm = 0.0;
   int plastic_cells = 0;
   // max |u(x1, x2) - u(x2, x1)| over all dof positions; the problem and
   // the mesh are symmetric under the swap, so the discrete solution
   // should be too.
   double symmetry_error = 0.0;
};
PlasticityResult plasticity_case(int n, ScalarScheme scheme,
                                 const NewtonConfig &config = {},
                                 TractionAveraging averaging =
                                    TractionAveraging::StressOfMean,
                                 const AssemblyOptions &options = {});

// Piecewise constant stress of a scalar solution projected to mesh
// vertices by measure-weighted averaging of adjacent cells. Two components
// per vertex.
std::vector<double> project_stress_to_vertices(const ScalarProblem &problem,
                                               const Eigen::VectorXd &u);

enum class CaseMethod
{
   DG,
   CG,
   Both
};

// One of the canned hyperelastic setups solved with the interior penalty
// scheme, the conforming reference, or both (then the relative L2
// difference of the displacement fields is reported).
struct HyperelasticResult
{
   ElasticityProblem problem;
   Eigen::VectorXd u_dg;
   Eigen::VectorXd u_cg;
   NewtonTrace trace_dg;
   NewtonTrace trace_cg;
   double dg_cg_l2_diff = -1.0;
};
HyperelasticResult hyperelastic_case(const std::string &name, int n,
                                     CaseMethod method = CaseMethod::Both,
                                     const NewtonConfig &config = {},
                                     const ElasticityAssemblyOptions &options = {});

} // namespace dgn
