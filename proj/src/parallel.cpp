#include "duality/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace duality {

int worker_count() {
    int n = omp_get_max_threads();
    if (const char* cap = std::getenv("DUALITY_LAB_THREADS")) {
        try {
            const int c = std::stoi(cap);
            if (c > 0) n = c;
        } catch (const std::exception&) {
        }
    }
    return std::max(1, n);
}

}  // namespace duality
