#pragma once

#include <vector>

#include <Eigen/Sparse>

namespace dgn
{

// Assembled tangent system K du = r in triplet form. The right hand side
// is the Newton residual: du is the additive update.
struct SparseSystem
{
   int n = 0;
   std::vector<Eigen::Triplet<double>> triplets;
   Eigen::VectorXd rhs;

   explicit SparseSystem(int n = 0) : n(n), rhs(Eigen::VectorXd::Zero(n)) {}

   void add(int row, int col, double value)
   {
      triplets.emplace_back(row, col, value);
   }

   Eigen::SparseMatrix<double> matrix() const;
};

// max_ij |K_ij - K_ji| / max_ij |K_ij|, zero for an empty matrix.
double symmetry_defect(const Eigen::SparseMatrix<double> &K);

} // namespace dgn
