#include "dgnewton/solver.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "dgnewton/materials.hpp"

namespace dgn
{

namespace
{

std::string format_double(double v)
{
   char buf[32];
   auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
   return std::string(buf, ptr);
}

double inf_norm(const Eigen::SparseMatrix<double> &K)
{
   Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(K.rows());
   for (int col = 0; col < K.outerSize(); ++col)
   {
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it)
      {
         row_sums[it.row()] += std::abs(it.value());
      }
   }
   return K.rows() > 0 ? row_sums.maxCoeff() : 0.0;
}

// Normwise backward error; ~machine epsilon for any successful
// factorization, independent of conditioning, and large when the
// factorization broke down.
double backward_error(const Eigen::SparseMatrix<double> &K, double K_norm,
                      const Eigen::VectorXd &x, const Eigen::VectorXd &b)
{
   const double scale = K_norm * x.lpNorm<Eigen::Infinity>() +
                        b.lpNorm<Eigen::Infinity>();
   if (scale == 0.0)
   {
      return 0.0;
   }
   return (b - K * x).lpNorm<Eigen::Infinity>() / scale;
}

void check_residual(const Eigen::SparseMatrix<double> &K, const Eigen::VectorXd &x,
                    const Eigen::VectorXd &b)
{
   const double eta = backward_error(K, inf_norm(K), x, b);
   if (!(eta <= 1e-10))
   {
      throw SolveError("linear solve backward error " + format_double(eta) +
                       " exceeds 1e-10", eta);
   }
}

// Iterative refinement; recovers the digits a single backsolve loses on
// ill-conditioned systems. Stops once the backward error is small or
// stops shrinking.
template <class Factorization>
Eigen::VectorXd solve_refined(const Factorization &fact,
                              const Eigen::SparseMatrix<double> &K,
                              const Eigen::VectorXd &b)
{
   Eigen::VectorXd x = fact.solve(b);
   const double K_norm = inf_norm(K);
   double prev = std::numeric_limits<double>::infinity();
   for (int pass = 0; pass < 3; ++pass)
   {
      const double eta = backward_error(K, K_norm, x, b);
      if (eta <= 1e-14 || eta >= prev)
      {
         break;
      }
      prev = eta;
      x += fact.solve(Eigen::VectorXd(b - K * x));
   }
   return x;
}

} // namespace

Eigen::VectorXd linear_solve(const SparseSystem &system, const SolveOptions &options)
{
   if (system.n == 0)
   {
      return Eigen::VectorXd();
   }
   const Eigen::SparseMatrix<double> K = system.matrix();
   const Eigen::VectorXd &b = system.rhs;

   if (options.require_spd)
   {
      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(K);
      if (llt.info() != Eigen::Success)
      {
         throw SolveError("matrix is not symmetric positive definite");
      }
      Eigen::VectorXd x = solve_refined(llt, K, b);
      check_residual(K, x, b);
      return x;
   }

   if (system.n <= options.direct_size_limit)
   {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
      if (ldlt.info() != Eigen::Success)
      {
         throw SolveError("LDLT factorization failed");
      }
      Eigen::VectorXd x = solve_refined(ldlt, K, b);
      check_residual(K, x, b);
      return x;
   }

   Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                            Eigen::Lower | Eigen::Upper,
                            Eigen::DiagonalPreconditioner<double>>
      cg(K);
   cg.setTolerance(options.iterative_tol);
   cg.setMaxIterations(20 * system.n);
   Eigen::VectorXd x = cg.solve(b);
   if (cg.info() != Eigen::Success)
   {
      throw SolveError("conjugate gradients stalled at relative residual " +
                       format_double(cg.error()), cg.error());
   }
   check_residual(K, x, b);
   return x;
}

void NewtonTrace::write_csv(std::ostream &out) const
{
   out << "step,iter,load_factor,residual_norm,increment_norm,symmetry_defect\n";
   for (const auto &row : rows)
   {
      out << row.step << ',' << row.iter << ',' << format_double(row.load_factor)
          << ',' << format_double(row.residual_norm) << ','
          << format_double(row.increment_norm) << ','
          << format_double(row.symmetry_defect) << '\n';
   }
}

namespace
{

enum class StepOutcome
{
   Converged,
   Failed
};

StepOutcome newton_step(const NewtonProblem &problem, const NewtonConfig &config,
                        const SolveOptions &options, double s, int step_index,
                        Eigen::VectorXd &u, NewtonTrace &trace, int &solves)
{
   double r0 = 0.0;
   double prev_residual = std::numeric_limits<double>::infinity();
   double increment = 0.0;
   int growth_streak = 0;
   solves = 0;

   for (int iter = 0;; ++iter)
   {
      SparseSystem system(problem.num_dofs);
      try
      {
         system = problem.assemble(u, s);
      }
      catch (const InvertedElementError &)
      {
         trace.failure = "inverted element at load factor " + format_double(s);
         return StepOutcome::Failed;
      }

      const Eigen::SparseMatrix<double> K = system.matrix();
      const double residual = system.rhs.norm();
      const double defect = symmetry_defect(K);
      trace.rows.push_back({step_index, iter, s, residual, increment, defect});
      trace.max_symmetry_defect = std::max(trace.max_symmetry_defect, defect);

      if (iter == 0)
      {
         r0 = residual;
      }
      if (residual <= config.tol_abs + config.tol_rel * r0)
      {
         trace.final_residual = residual;
         return StepOutcome::Converged;
      }
      if (residual > prev_residual)
      {
         if (++growth_streak >= 3)
         {
            trace.failure = "residual grew three times in a row at load factor " +
                            format_double(s);
            return StepOutcome::Failed;
         }
      }
      else
      {
         growth_streak = 0;
      }
      prev_residual = residual;

      if (iter >= config.max_iter)
      {
         trace.failure = "no convergence in " + std::to_string(config.max_iter) +
                         " iterations at load factor " + format_double(s);
         return StepOutcome::Failed;
      }

      Eigen::VectorXd du;
      try
      {
         du = linear_solve(system, options);
      }
      catch (const SolveError &err)
      {
         trace.failure = std::string("linear solve failed: ") + err.what();
         return StepOutcome::Failed;
      }
      ++solves;
      u += du;
      increment = du.norm();
   }
}

} // namespace

std::pair<Eigen::VectorXd, NewtonTrace> newton_solve(const NewtonProblem &problem,
                                                     const NewtonConfig &config,
                                                     const SolveOptions &options)
{
   Eigen::VectorXd u = Eigen::VectorXd::Zero(problem.num_dofs);
   NewtonTrace trace;

   double s_done = 0.0;
   double ds = 1.0 / std::max(1, config.load_steps);
   int halvings = 0;
   int step_index = 0;

   while (s_done < 1.0 - 1e-14)
   {
      const double s = std::min(1.0, s_done + ds);
      Eigen::VectorXd u_try = u;
      int solves = 0;
      const StepOutcome outcome = newton_step(problem, config, options, s,
                                              step_index, u_try, trace, solves);
      ++step_index;
      if (outcome == StepOutcome::Converged)
      {
         u = u_try;
         s_done = s;
         trace.total_iterations += solves;
         continue;
      }
      if (++halvings > config.max_halvings)
      {
         trace.converged = false;
         throw NonConvergenceError(trace.failure.empty()
                                      ? "Newton iteration failed"
                                      : trace.failure,
                                   trace);
      }
      ds *= 0.5;
   }

   trace.converged = true;
   return {std::move(u), std::move(trace)};
}

} // namespace dgn
