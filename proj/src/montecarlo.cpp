#include "duality/montecarlo.hpp"

#include <cmath>
#include <exception>
#include <vector>

#include "duality/errors.hpp"
#include "duality/parallel.hpp"

namespace duality {

void Accumulator::add(cplx z) {
    ++n_;
    const cplx d = z - mean_;
    mean_ += d / double(n_);
    m2_ += std::real(std::conj(d) * (z - mean_));
}

void Accumulator::merge(const Accumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double n = double(n_ + o.n_);
    const cplx d = o.mean_ - mean_;
    mean_ += d * (double(o.n_) / n);
    m2_ += o.m2_ + std::norm(d) * double(n_) * double(o.n_) / n;
    n_ += o.n_;
}

Estimate Accumulator::estimate() const {
    Estimate e;
    e.n = n_;
    e.mean = mean_;
    e.se = n_ > 1 ? std::sqrt(m2_ / double(n_ - 1) / double(n_)) : 0.0;
    return e;
}

Estimate monte_carlo(std::uint64_t seed, std::uint64_t stream_base, std::int64_t paths,
                     const std::function<cplx(RngStream&)>& draw, std::int64_t chunk) {
    if (paths < 2) throw ParameterError("monte_carlo: need at least two paths");
    if (chunk < 1) throw ParameterError("monte_carlo: chunk must be positive");
    const std::int64_t nchunks = (paths + chunk - 1) / chunk;
    std::vector<Accumulator> parts(static_cast<std::size_t>(nchunks));
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (std::int64_t c = 0; c < nchunks; ++c) {
        try {
            RngStream rng(seed, stream_base + std::uint64_t(c));
            const std::int64_t m = std::min(chunk, paths - c * chunk);
            auto& acc = parts[std::size_t(c)];
            for (std::int64_t i = 0; i < m; ++i) acc.add(draw(rng));
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    Accumulator total;
    for (const auto& p : parts) total.merge(p);
    return total.estimate();
}

}  // namespace duality
