#pragma once

namespace duality {

// Worker count for parallel regions: OpenMP's default, capped by DUALITY_LAB_THREADS when set.
int worker_count();

}  // namespace duality
