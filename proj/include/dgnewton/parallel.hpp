#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#ifdef DGN_HAVE_OPENMP
#include <omp.h>
#endif

namespace dgn
{

// Effective thread count: `requested` capped by the DGNEWTON_THREADS
// environment variable when set; 0 means the OpenMP default. Returns 1
// when built without OpenMP.
int resolve_threads(int requested);

// Runs item(i, triplets, rhs) for i in [0, count) and collects the output
// into `triplets` / `rhs`. threads <= 1 runs the loop in place; otherwise
// the range is split statically, each thread fills private buffers, and
// buffers merge in thread order. Output is identical from run to run for
// a fixed thread count.
template <typename Item>
void assemble_items(int count, int threads, std::vector<Eigen::Triplet<double>> &triplets,
                    Eigen::VectorXd &rhs, Item &&item)
{
#ifdef DGN_HAVE_OPENMP
   if (threads > 1)
   {
      std::vector<std::vector<Eigen::Triplet<double>>> local_triplets(threads);
      std::vector<Eigen::VectorXd> local_rhs(threads,
                                             Eigen::VectorXd::Zero(rhs.size()));
      #pragma omp parallel num_threads(threads)
      {
         const int t = omp_get_thread_num();
         #pragma omp for schedule(static)
         for (int i = 0; i < count; ++i)
         {
            item(i, local_triplets[t], local_rhs[t]);
         }
      }
      for (int t = 0; t < threads; ++t)
      {
         triplets.insert(triplets.end(), local_triplets[t].begin(),
                         local_triplets[t].end());
         rhs += local_rhs[t];
      }
      return;
   }
#else
   (void)threads;
#endif
   for (int i = 0; i < count; ++i)
   {
      item(i, triplets, rhs);
   }
}

} // namespace dgn
