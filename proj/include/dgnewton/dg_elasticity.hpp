#pragma once

#include <functional>
#include <string>

#include "dgnewton/fem.hpp"
#include "dgnewton/materials.hpp"
#include "dgnewton/mesh.hpp"
#include "dgnewton/solver.hpp"
#include "dgnewton/system.hpp"

namespace dgn
{

// Finite elasticity on a 3D mesh: find u with -Div P(I + grad u) = f,
// u = 0 on boundary faces tagged "dirichlet", zero traction elsewhere.
struct ElasticityProblem
{
   Mesh mesh;
   MooneyRivlinMaterial material = MooneyRivlinMaterial::from_moduli(200.0, 0.33);
   std::function<Eigen::Vector3d(const Eigen::Vector3d &)> body_force;
   double gamma0 = 100.0 * 200.0; // 100 x Young's modulus of the default material
};

struct ElasticityAssemblyOptions
{
   int threads = 1;
};

// Newton step system for the interior penalty discretization at state u_n,
// loads scaled by s. Face terms use the stress and tangent of the averaged
// deformation gradient (one-sided on clamped faces); the penalty is
// weighted by the tangent, (gamma0 / h) (jump x N) : dP/dF : (jump x N).
// Clamped faces enter through the same terms with zero boundary data.
SparseSystem assemble_elasticity_dg(const ElasticityProblem &problem,
                                    const Eigen::VectorXd &u_n, double s = 1.0,
                                    const ElasticityAssemblyOptions &options = {});

// Tangent matrix / residual vector of the step system on their own.
Eigen::SparseMatrix<double>
assemble_dg_tangent(const ElasticityProblem &problem, const Eigen::VectorXd &u_n,
                    const ElasticityAssemblyOptions &options = {});
Eigen::VectorXd assemble_dg_residual(const ElasticityProblem &problem,
                                     const Eigen::VectorXd &u_n, double s = 1.0,
                                     const ElasticityAssemblyOptions &options = {});

// Conforming reference discretization: vertex-based P1 with clamped dofs
// eliminated symmetrically (unit diagonal, zero row, column and right hand
// side), no face terms.
SparseSystem assemble_elasticity_cg(const ElasticityProblem &problem,
                                    const Eigen::VectorXd &u_n, double s = 1.0,
                                    const ElasticityAssemblyOptions &options = {});

// Vertex dofs eliminated by the clamp, in the CG dof numbering.
std::vector<char> clamped_dofs(const Mesh &mesh);

enum class ElasticityMethod
{
   DG,
   CG
};

// Newton iteration with load stepping. A positive config.gamma0
// overrides problem.gamma0 for the solve.
std::pair<Eigen::VectorXd, NewtonTrace>
newton_solve_elasticity(ElasticityProblem problem, ElasticityMethod method,
                        const NewtonConfig &config = {},
                        const ElasticityAssemblyOptions &options = {});

// Canned benchmark setups on a box clamped at the X = 0 face,
// E = 200, nu = 0.33 (force and stiffness in consistent units):
//
//   twist   unit cube, n x n x n,    f = (0, 200 - 400 Z, 400 Y - 200)
//   stretch unit cube, n x n x n,    f = (250, 0, 0)
//   bend    beam (0, 1/2) x (0, 1/10) x (0, 1/10), 5n x n x n,
//           f = (0, 0, -15)
//
// Unknown names throw std::invalid_argument.
ElasticityProblem load_case(const std::string &name, int n);

} // namespace dgn
