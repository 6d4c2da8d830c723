// Serial vs OpenMP kernel-matrix assembly, plus a Monte Carlo batch at 1 and all workers.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>

#include "duality/kernels.hpp"
#include "duality/montecarlo.hpp"
#include "duality/numerics.hpp"
#include "duality/pairs.hpp"
#include "duality/simulate.hpp"

using namespace duality;

namespace {

const numerics::QuadratureGrid& cir_grid() {
    static const auto g = pairs::cir_x_grid(10);
    return g;
}

numerics::Kernel2 cir_kernel() {
    return [](double a, double b) { return kernels::cir_kernel(0.5, a, b, {0.5}); };
}

numerics::Kernel2 cauchy_kernel() {
    return [](double a, double b) { return kernels::cauchy_radial_kernel(0.3, a, b); };
}

const numerics::QuadratureGrid& radial_grid() {
    static const auto g = numerics::QuadratureGrid::composite_gauss_legendre(0, 28, 280, 8);
    return g;
}

void BM_cir_matrix_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(numerics::build_kernel_matrix_serial(cir_kernel(), cir_grid(), cir_grid()));
    st.counters["entries"] = double(cir_grid().size() * cir_grid().size());
}

void BM_cir_matrix_openmp(benchmark::State& st) {
    omp_set_num_threads(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(numerics::build_kernel_matrix(cir_kernel(), cir_grid(), cir_grid()));
    st.counters["entries"] = double(cir_grid().size() * cir_grid().size());
}

void BM_cauchy_matrix_serial(benchmark::State& st) {
    for (auto _ : st)
        benchmark::DoNotOptimize(numerics::build_kernel_matrix_serial(cauchy_kernel(), radial_grid(), radial_grid()));
}

void BM_cauchy_matrix_openmp(benchmark::State& st) {
    omp_set_num_threads(int(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(numerics::build_kernel_matrix(cauchy_kernel(), radial_grid(), radial_grid()));
}

void BM_excursion_batch(benchmark::State& st) {
    ::setenv("DUALITY_LAB_THREADS", std::to_string(st.range(0)).c_str(), 1);
    const double obs[] = {0.25, 0.5, 0.75};
    for (auto _ : st)
        benchmark::DoNotOptimize(monte_carlo(42, 7, 4000, [&](RngStream& rng) {
            const auto p = simulate::sample_excursion(rng, obs);
            return cplx(std::exp(-p.values[0] - p.values[1] - p.values[2]));
        }));
    ::unsetenv("DUALITY_LAB_THREADS");
}

}  // namespace

BENCHMARK(BM_cir_matrix_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cir_matrix_openmp)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cauchy_matrix_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cauchy_matrix_openmp)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_excursion_batch)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
