#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgnewton/system.hpp"

namespace dgn
{

struct SolveOptions
{
   // Fail instead of falling back when the matrix is not positive definite.
   bool require_spd = false;
   // Switch from a direct factorization to conjugate gradients above this
   // size.
   int direct_size_limit = 50000;
   double iterative_tol = 1e-12;
};

struct SolveError : std::runtime_error
{
   explicit SolveError(const std::string &what, double residual = -1.0)
      : std::runtime_error(what), achieved_residual(residual)
   {
   }
   double achieved_residual;
};

// Solves K x = b for the symmetric matrix assembled in `system`.
// Direct LDLT (LLT under require_spd) up to direct_size_limit dofs,
// Jacobi-preconditioned conjugate gradients beyond. Direct solves get
// iterative refinement; the normwise backward error of the returned
// solution is checked against 1e-10, and failure throws SolveError.
Eigen::VectorXd linear_solve(const SparseSystem &system,
                             const SolveOptions &options = {});

struct NewtonConfig
{
   double tol_rel = 1e-8;
   double tol_abs = 1e-10;
   int max_iter = 30;
   int load_steps = 1;
   int max_halvings = 6;
   double gamma0 = 0.0; // > 0 overrides the problem's penalty scale
};

struct NewtonTraceRow
{
   int step;              // load step index (attempts included)
   int iter;              // Newton iteration within the step
   double load_factor;
   double residual_norm;
   double increment_norm; // |du| of the update that produced this state
   double symmetry_defect;
};

struct NewtonTrace
{
   std::vector<NewtonTraceRow> rows;
   bool converged = false;
   double final_residual = 0.0;
   int total_iterations = 0; // linear solves across all accepted steps
   double max_symmetry_defect = 0.0;
   std::string failure;

   // CSV with a fixed header; shortest round-trip formatting, so output is
   // reproducible byte for byte given identical arithmetic.
   void write_csv(std::ostream &out) const;
};

struct NonConvergenceError : std::runtime_error
{
   NonConvergenceError(const std::string &what, NewtonTrace trace)
      : std::runtime_error(what), trace(std::move(trace))
   {
   }
   NewtonTrace trace;
};

// One nonlinear problem as seen by the Newton driver: dof count plus the
// assembly of tangent and residual at a state u and load factor s in [0, 1].
struct NewtonProblem
{
   int num_dofs = 0;
   std::function<SparseSystem(const Eigen::VectorXd &u, double s)> assemble;
};

// Damped-by-load-stepping Newton iteration. The load factor advances in
// `load_steps` equal increments; a step that fails (iteration budget,
// three consecutive residual increases, singular tangent, or an inverted
// element) is retried with the increment halved, up to max_halvings times,
// after which NonConvergenceError carries out the trace. Each accepted
// step warm-starts the next. Convergence per step:
// |r| <= tol_abs + tol_rel * |r0| with r0 the step's initial residual.
std::pair<Eigen::VectorXd, NewtonTrace> newton_solve(const NewtonProblem &problem,
                                                     const NewtonConfig &config,
                                                     const SolveOptions &options = {});

} // namespace dgn
