#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "dgnewton/fem.hpp"
#include "dgnewton/materials.hpp"
#include "dgnewton/mesh.hpp"
#include "dgnewton/solver.hpp"
#include "dgnewton/system.hpp"

namespace dgn
{

// How the face traction and its linearization are formed on interior faces.
enum class TractionAveraging
{
   StressOfMean, // sigma(<grad u>): stress of the averaged gradient
   MeanOfStress  // <sigma(grad u)>: average of the one-sided stresses
};

// Scalar second-order problem -div sigma(grad u) = f on a 2D mesh with
// Dirichlet data g on boundary faces tagged "dirichlet". Other boundary
// faces get the natural condition.
struct ScalarProblem
{
   Mesh mesh;
   SpaceKind space = SpaceKind::DG;
   std::shared_ptr<const ScalarMaterial> material;
   std::function<double(const Eigen::Vector3d &)> source;
   std::function<double(const Eigen::Vector3d &)> dirichlet;
   double gamma0 = 100.0;
   TractionAveraging averaging = TractionAveraging::StressOfMean;
};

struct AssemblyOptions
{
   // 1 = serial reference path. More threads partition the cell and face
   // loops statically; triplet buffers merge in thread order, so results
   // are reproducible for a fixed thread count.
   int threads = 1;
};

// Interior penalty discretization of the linear problem sigma = sigma'(0) g
// (for the linear law, sigma = k grad u). Jump terms act on interior and
// Dirichlet faces for a DG space, Dirichlet faces only for CG. Standalone
// code path, kept independent of the Newton assemblies that must reproduce
// it.
SparseSystem assemble_nitsche_linear(const ScalarProblem &problem,
                                     const AssemblyOptions &options = {});

// Newton step system at state u_n with loads scaled by s: tangent matrix
// and residual right hand side. Face tractions use the averaged gradient
// or averaged stress per problem.averaging, with one-sided values on
// Dirichlet faces.
SparseSystem assemble_dg_classical(const ScalarProblem &problem,
                                   const Eigen::VectorXd &u_n, double s = 1.0,
                                   const AssemblyOptions &options = {});

// Hybridized variant: every element owns its boundary traction, built from
// its own one-sided stress, tested against v_T - <v>, and penalized with
// the per-element length scale h_T = |T| / |E|. No traction averaging
// enters; the scheme stays symmetric because each element contributes a
// symmetric block. Coincides with assemble_dg_classical on a CG space.
SparseSystem assemble_dg_hybrid(const ScalarProblem &problem,
                                const Eigen::VectorXd &u_n, double s = 1.0,
                                const AssemblyOptions &options = {});

enum class ScalarScheme
{
   Classical,
   Hybrid
};

// Newton iteration on the chosen scheme. A positive config.gamma0
// overrides problem.gamma0 for the solve.
std::pair<Eigen::VectorXd, NewtonTrace>
newton_solve_scalar(ScalarProblem problem, ScalarScheme scheme,
                    const NewtonConfig &config = {},
                    const AssemblyOptions &options = {});

// Per-cell constitutive state of a P1 solution.
struct ScalarCellState
{
   Eigen::Vector2d grad;
   Eigen::Vector2d stress;
   Eigen::Matrix2d tangent;
   bool plastic;
};
ScalarCellState scalar_cell_state(const ScalarProblem &problem,
                                  const Eigen::VectorXd &u, int cell);

// Largest constant C_T per element in the inverse estimate
//
//   sum_{E in dT} h_{E,T} |sigma'^(1/2) grad v|^2_E
//   <= C_T |sigma'^(1/2) grad v|^2_T,   h_{E,T} = |T| / |E|,
//
// over P1 functions v, computed as the largest generalized eigenvalue of
// the corresponding pair of gradient-space forms. Equals the face count
// whenever sigma' is positive definite; +infinity flags a singular
// tangent. The stable penalty scale is gamma0 > C_T.
std::vector<double>
estimate_inverse_constant(const Mesh &mesh,
                          const std::vector<Eigen::Matrix2d> &cell_tangents);

} // namespace dgn
