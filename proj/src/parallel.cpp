#include "silentflow/parallel.hpp"

#include <omp.h>

namespace silentflow {

int ExecPolicy::threads() const { return workers > 0 ? workers : omp_get_max_threads(); }

}  // namespace silentflow
