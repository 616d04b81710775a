#include "dgnewton/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace dgn
{

int resolve_threads(int requested)
{
#ifdef DGN_HAVE_OPENMP
   int threads = requested > 0 ? requested : omp_get_max_threads();
   if (const char *cap = std::getenv("DGNEWTON_THREADS"))
   {
      try
      {
         threads = std::min(threads, std::max(1, std::stoi(cap)));
      }
      catch (const std::exception &)
      {
         // Unparseable cap is ignored.
      }
   }
   return std::max(1, threads);
#else
   (void)requested;
   return 1;
#endif
}

} // namespace dgn
