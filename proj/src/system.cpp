#include "dgnewton/system.hpp"

#include <cmath>

namespace dgn
{

Eigen::SparseMatrix<double> SparseSystem::matrix() const
{
   Eigen::SparseMatrix<double> K(n, n);
   K.setFromTriplets(triplets.begin(), triplets.end());
   return K;
}

double symmetry_defect(const Eigen::SparseMatrix<double> &K)
{
   if (K.nonZeros() == 0)
   {
      return 0.0;
   }
   Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(K.transpose()) - K;
   double max_diff = 0.0;
   for (int k = 0; k < D.outerSize(); ++k)
   {
      for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
      {
         max_diff = std::max(max_diff, std::abs(it.value()));
      }
   }
   double max_entry = 0.0;
   for (int k = 0; k < K.outerSize(); ++k)
   {
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      {
         max_entry = std::max(max_entry, std::abs(it.value()));
      }
   }
   return max_entry > 0.0 ? max_diff / max_entry : 0.0;
}

} // namespace dgn
