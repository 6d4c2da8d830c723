#pragma once

#include <functional>
#include <span>
#include <vector>

#include "duality/kernels.hpp"
#include "duality/numerics.hpp"
#include "duality/rng.hpp"

namespace duality::simulate {

struct PathSample {
    std::vector<double> times;
    std::vector<double> values;
    cplx weight{1.0, 0.0};
};

// Normalized excursion by Vervaat rotation of a Brownian bridge on a uniform grid of the given step.
// The bridge minimum is drawn exactly on the near-minimal grid intervals; the rotation point is the
// midpoint of the interval holding it.
PathSample sample_excursion(RngStream& rng, std::span<const double> obs_times, double step = 1e-3);

enum class MeanderMethod {
    bessel_bridge,  // Rayleigh endpoint, then the norm of a 3-d Brownian bridge; no kernel formulas
    kernel          // sequential inverse-CDF sampling through meander_kernel on a grid
};
PathSample sample_meander(RngStream& rng, std::span<const double> obs_times,
                          MeanderMethod method = MeanderMethod::bessel_bridge);

// Time-dependent transition density kernel(t1, t2, y1, y2).
using TransitionDensity = std::function<double(double, double, double, double)>;

// Successive inverse-CDF draws from kernel(t_prev, t_k, y_prev, .) on the grid, starting at (t0, y0).
PathSample sample_markov_chain_from_kernel(RngStream& rng, const TransitionDensity& kernel,
                                           const numerics::QuadratureGrid& grid, double t0, double y0,
                                           std::span<const double> obs_times);

// Exact CIR transitions through the Poisson mixture of gamma laws; the path starts at x0 at time 0.
PathSample sample_cir(RngStream& rng, double x0, std::span<const double> obs_times, kernels::CIRParams p);
double sample_cir_step(RngStream& rng, double x, double dt, kernels::CIRParams p);

// Event-driven birth-death chain up to `horizon`: times are jump epochs (starting with 0).
// A death from state 0 (rate alpha) kills the chain; the killed state is recorded as -1.
PathSample sample_birth_death(RngStream& rng, int k0, double horizon, kernels::CIRParams p);
int state_at(const PathSample& path, double t);

// Levy path observed at obs_times, started at 0 at time 0. Exact for the catalog exponents.
PathSample sample_levy(RngStream& rng, const kernels::LevyExponent& e, std::span<const double> obs_times);

// Jump epochs of a Poisson process of the given rate on [0, horizon].
std::vector<double> sample_poisson_jumps(RngStream& rng, double rate, double horizon);

// exp(-sum_k rate(values[k]) (t[k+1] - t[k])): left-point Stieltjes sum, i.e. the value before each
// increment of the time change is used.
cplx feynman_kac_weight(const PathSample& path, const std::function<cplx(double)>& rate,
                        std::span<const double> t_values);
// Time change equal to the path's own clock.
cplx feynman_kac_weight(const PathSample& path, const std::function<cplx(double)>& rate);

}  // namespace duality::simulate
