#pragma once

#include <cstdint>
#include <functional>

#include "duality/numerics.hpp"
#include "duality/rng.hpp"

namespace duality {

struct Estimate {
    cplx mean{0.0, 0.0};
    double se = 0;  // sqrt(E|Z - mean|^2 / n)
    std::int64_t n = 0;
};

// Running mean and second moment; merge is Chan's pairwise update.
class Accumulator {
public:
    void add(cplx z);
    void merge(const Accumulator& other);
    Estimate estimate() const;

private:
    std::int64_t n_ = 0;
    cplx mean_{0.0, 0.0};
    double m2_ = 0;
};

// Draws `paths` samples in fixed chunks; chunk c uses RngStream(seed, stream_base + c), and chunks are
// merged in index order, so the result does not depend on the number of threads.
Estimate monte_carlo(std::uint64_t seed, std::uint64_t stream_base, std::int64_t paths,
                     const std::function<cplx(RngStream&)>& draw, std::int64_t chunk = 1000);

}  // namespace duality
