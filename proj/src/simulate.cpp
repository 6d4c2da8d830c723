#include "duality/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "duality/errors.hpp"

namespace duality::simulate {

namespace {

void check_obs(std::span<const double> obs, double lo, double hi, bool hi_open) {
    if (obs.empty()) throw ParameterError("sampler: no observation times");
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (!(obs[i] > lo) || obs[i] > hi || (hi_open && obs[i] >= hi))
            throw ParameterError("sampler: observation time outside the admissible range");
        if (i > 0 && !(obs[i] > obs[i - 1])) throw ParameterError("sampler: observation times must increase");
    }
}

// Exact minimum of a Brownian bridge from a to b over time d.
double bridge_min(RngStream& rng, double a, double b, double d) {
    const double e = (a - b) * (a - b) - 2.0 * d * std::log(rng.uniform());
    return 0.5 * (a + b - std::sqrt(e));
}

}  // namespace

PathSample sample_excursion(RngStream& rng, std::span<const double> obs, double step) {
    check_obs(obs, 0.0, 1.0, true);
    const int n = std::max(1, int(std::lround(1.0 / step)));
    const double dt = 1.0 / n;
    for (std::size_t i = 1; i < obs.size(); ++i)
        if (obs[i] - obs[i - 1] < dt * (1 - 1e-9)) throw ParameterError("sample_excursion: step exceeds obs spacing");

    std::vector<double> b(std::size_t(n) + 1);
    b[0] = 0;
    const double sd = std::sqrt(dt);
    for (int k = 1; k <= n; ++k) b[std::size_t(k)] = b[std::size_t(k - 1)] + sd * rng.normal();
    const double wn = b[std::size_t(n)];
    for (int k = 0; k <= n; ++k) b[std::size_t(k)] -= wn * k * dt;
    b[std::size_t(n)] = 0;

    // exact minimum of the bridge on each near-minimal interval; the others sit 4 sd above
    const double band = *std::min_element(b.begin(), b.end()) + 4.0 * sd;
    double best = std::numeric_limits<double>::infinity(), tau = 0;
    for (int i = 0; i < n; ++i) {
        const double a0 = b[std::size_t(i)], a1 = b[std::size_t(i + 1)];
        if (std::min(a0, a1) > band) continue;
        const double m = bridge_min(rng, a0, a1, dt);
        if (m < best) {
            best = m;
            tau = (i + 0.5) * dt;
        }
    }

    auto bridge_at = [&](double u) {
        u -= std::floor(u);
        const double pos = u * n;
        const int k = std::min(n - 1, int(pos));
        const double f = pos - k;
        return (1 - f) * b[std::size_t(k)] + f * b[std::size_t(k + 1)];
    };
    PathSample p;
    p.times.assign(obs.begin(), obs.end());
    p.values.reserve(obs.size());
    for (double s : obs) p.values.push_back(std::max(0.0, bridge_at(tau + s) - best));
    return p;
}

PathSample sample_meander(RngStream& rng, std::span<const double> obs, MeanderMethod method) {
    check_obs(obs, 0.0, 1.0, false);
    PathSample p;
    p.times.assign(obs.begin(), obs.end());
    if (method == MeanderMethod::kernel) {
        static const auto grid = numerics::QuadratureGrid::composite_gauss_legendre(0.0, 12.0, 240, 4);
        return sample_markov_chain_from_kernel(rng, kernels::meander_kernel, grid, 0.0, 0.0, obs);
    }
    // meander = BES(3) bridge from 0 to a Rayleigh endpoint
    const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
    double x[3] = {0, 0, 0};
    const double end[3] = {r, 0, 0};
    double tp = 0;
    for (double t : obs) {
        if (t >= 1.0) {
            p.values.push_back(r);
            continue;
        }
        const double frac = (t - tp) / (1 - tp);
        const double sd = std::sqrt((t - tp) * (1 - t) / (1 - tp));
        double n2 = 0;
        for (int c = 0; c < 3; ++c) {
            x[c] += (end[c] - x[c]) * frac + sd * rng.normal();
            n2 += x[c] * x[c];
        }
        p.values.push_back(std::sqrt(n2));
        tp = t;
    }
    return p;
}

PathSample sample_markov_chain_from_kernel(RngStream& rng, const TransitionDensity& kernel,
                                           const numerics::QuadratureGrid& grid, double t0, double y0,
                                           std::span<const double> obs) {
    PathSample p;
    p.times.assign(obs.begin(), obs.end());
    std::vector<double> dens(grid.size());
    double t = t0, y = y0;
    for (double tn : obs) {
        if (!(tn > t)) throw ParameterError("sample_markov_chain_from_kernel: times must increase");
        for (std::size_t i = 0; i < grid.size(); ++i) dens[i] = kernel(t, tn, y, grid.node(i));
        y = numerics::inverse_cdf_sample(grid, dens, rng.uniform());
        t = tn;
        p.values.push_back(y);
    }
    return p;
}

double sample_cir_step(RngStream& rng, double x, double dt, kernels::CIRParams p) {
    const double c = -1.0 / std::expm1(-dt);
    const double mean = c * x * std::exp(-dt);
    const int nmix = mean > 0 ? std::poisson_distribution<int>(mean)(rng) : 0;
    return std::gamma_distribution<double>(p.alpha + 1.0 + nmix, 1.0 / c)(rng);
}

PathSample sample_cir(RngStream& rng, double x0, std::span<const double> obs, kernels::CIRParams p) {
    if (!(x0 > 0)) throw ParameterError("sample_cir: x0 must be positive");
    check_obs(obs, 0.0, std::numeric_limits<double>::infinity(), false);
    PathSample out;
    out.times.assign(obs.begin(), obs.end());
    double x = x0, t = 0;
    for (double tn : obs) {
        x = sample_cir_step(rng, x, tn - t, p);
        t = tn;
        out.values.push_back(x);
    }
    return out;
}

PathSample sample_birth_death(RngStream& rng, int k0, double horizon, kernels::CIRParams p) {
    if (k0 < 0) throw ParameterError("sample_birth_death: k0 must be nonnegative");
    PathSample out;
    double t = 0;
    int k = k0;
    out.times.push_back(0);
    out.values.push_back(k);
    while (true) {
        const double up = k + 1.0, down = k + p.alpha;
        t += rng.exponential() / (up + down);
        if (t > horizon) break;
        if (rng.uniform() * (up + down) < up) {
            ++k;
        } else {
            --k;
        }
        out.times.push_back(t);
        out.values.push_back(k);
        if (k < 0) break;
    }
    return out;
}

int state_at(const PathSample& path, double t) {
    const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
    if (it == path.times.begin()) throw ParameterError("state_at: time before the path start");
    return int(path.values[std::size_t(it - path.times.begin() - 1)]);
}

std::vector<double> sample_poisson_jumps(RngStream& rng, double rate, double horizon) {
    std::vector<double> jumps;
    if (rate <= 0) return jumps;
    double t = rng.exponential() / rate;
    while (t <= horizon) {
        jumps.push_back(t);
        t += rng.exponential() / rate;
    }
    return jumps;
}

PathSample sample_levy(RngStream& rng, const kernels::LevyExponent& e, std::span<const double> obs) {
    check_obs(obs, 0.0, std::numeric_limits<double>::infinity(), false);
    using Kind = kernels::LevyExponent::Kind;
    PathSample out;
    out.times.assign(obs.begin(), obs.end());
    double x = 0, t = 0;
    for (double tn : obs) {
        const double dt = tn - t;
        switch (e.kind()) {
            case Kind::brownian:
                x += std::sqrt(e.param1() * dt) * rng.normal();
                break;
            case Kind::drifted_scaled_brownian:
                // exponent lambda y^2 - i beta y
                x += e.param2() * dt + std::sqrt(2 * e.param1() * dt) * rng.normal();
                break;
            case Kind::cauchy:
                x += dt * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
                break;
            case Kind::poisson:
                x += std::poisson_distribution<int>(dt)(rng);
                break;
            case Kind::compound_poisson_normal: {
                const int m = std::poisson_distribution<int>(e.param1() * dt)(rng);
                if (m > 0) x += e.param2() * std::sqrt(double(m)) * rng.normal();
                break;
            }
            default:
                throw ParameterError("sample_levy: unsupported exponent " + e.name());
        }
        t = tn;
        out.values.push_back(x);
    }
    return out;
}

cplx feynman_kac_weight(const PathSample& path, const std::function<cplx(double)>& rate,
                        std::span<const double> t_values) {
    if (t_values.size() != path.values.size())
        throw ParameterError("feynman_kac_weight: time change must match the path length");
    cplx acc = 0;
    for (std::size_t k = 0; k + 1 < t_values.size(); ++k) {
        const double inc = t_values[k + 1] - t_values[k];
        if (inc < 0) throw ParameterError("feynman_kac_weight: time change must be nondecreasing");
        if (inc > 0) acc += rate(path.values[k]) * inc;
    }
    return std::exp(-acc);
}

cplx feynman_kac_weight(const PathSample& path, const std::function<cplx(double)>& rate) {
    return feynman_kac_weight(path, rate, path.times);
}

}  // namespace duality::simulate
