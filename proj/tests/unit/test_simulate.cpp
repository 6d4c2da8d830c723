#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "duality/errors.hpp"
#include "duality/kernels.hpp"
#include "duality/montecarlo.hpp"
#include "duality/rng.hpp"
#include "duality/simulate.hpp"
#include "stats.hpp"

using namespace duality;
using namespace duality::simulate;
using numerics::quad_integrate;
using numerics::QuadratureGrid;
using testsupport::mean_se;
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

TEST_CASE("Philox known answers") {
    const auto z = RngStream::philox({0, 0, 0, 0}, {0, 0});
    CHECK(z == RngStream::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto o = RngStream::philox({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
    CHECK(o == RngStream::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("streams are deterministic and distinct") {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool differ_c = false, differ_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        differ_c |= x != c();
        differ_d |= x != d();
    }
    CHECK(differ_c);
    CHECK(differ_d);
    RngStream u(1, 1);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        REQUIRE(x > 0);
        REQUIRE(x < 1);
    }
    CHECK(stream_hash("abc") == stream_hash("abc"));
    CHECK(stream_hash("abc") != stream_hash("abd"));
}

TEST_CASE("monte carlo result does not depend on worker count") {
    auto draw = [](RngStream& r) { return cplx(r.normal(), r.uniform()); };
    const auto e1 = monte_carlo(5, 11, 12345, draw, 1000);
    const auto e2 = monte_carlo(5, 11, 12345, draw, 1000);
    CHECK(e1.mean == e2.mean);
    CHECK(e1.se == e2.se);
    CHECK(e1.n == 12345);
    CHECK(std::abs(e1.mean.real()) < 4 * std::sqrt(1.0 / 12345));
    Accumulator a, b, all;
    RngStream r(3, 3);
    for (int i = 0; i < 500; ++i) {
        const cplx z(r.normal(), 0);
        (i < 200 ? a : b).add(z);
        all.add(z);
    }
    a.merge(b);
    CHECK(a.estimate().mean.real() == doctest::Approx(all.estimate().mean.real()).epsilon(1e-12));
    CHECK(a.estimate().se == doctest::Approx(all.estimate().se).epsilon(1e-12));
}

TEST_CASE("excursion sampler") {
    RngStream rng(42, 1);
    const double obs[] = {0.5};
    std::vector<double> x, ex;
    for (int i = 0; i < 20000; ++i) {
        const auto p = sample_excursion(rng, obs);
        REQUIRE(p.values[0] >= 0);
        x.push_back(p.values[0]);
        ex.push_back(std::exp(-p.values[0]));
    }
    const auto dens = [](double v) { return kernels::excursion_entrance_density(0.5, v); };
    const double m1 = quad_integrate([&](double v) { return v * dens(v); }, {0, inf}, 1e-12).value;
    const double m2 = quad_integrate([&](double v) { return std::exp(-v) * dens(v); }, {0, inf}, 1e-12).value;
    const auto a = mean_se(x), b = mean_se(ex);
    CHECK(std::abs(a.mean - m1) < 3 * a.se);
    CHECK(std::abs(b.mean - m2) < 3 * b.se);

    const double edge[] = {1e-3, 0.999};
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        const auto p = sample_excursion(rng, edge);
        worst = std::max({worst, p.values[0], p.values[1]});
    }
    CHECK(worst < 0.25);
    const double bad[] = {0.5, 0.5005};
    CHECK_THROWS_AS(sample_excursion(rng, bad), ParameterError);
}

TEST_CASE("meander sampler routes") {
    RngStream rng(42, 2);
    const double obs[] = {0.5, 1.0};
    std::vector<double> end_a, end_b, mid_a, mid_b;
    for (int i = 0; i < 20000; ++i) {
        const auto p = sample_meander(rng, obs, MeanderMethod::bessel_bridge);
        REQUIRE(p.values[0] > 0);
        mid_a.push_back(p.values[0]);
        end_a.push_back(p.values[1]);
    }
    for (int i = 0; i < 5000; ++i) {
        const auto p = sample_meander(rng, obs, MeanderMethod::kernel);
        REQUIRE(p.values[0] > 0);
        mid_b.push_back(p.values[0]);
        end_b.push_back(p.values[1]);
    }
    const double rayleigh = quad_integrate([](double v) { return v * v * std::exp(-v * v / 2); }, {0, inf}, 1e-13).value;
    CHECK(rayleigh == doctest::Approx(std::sqrt(pi / 2)).epsilon(1e-10));
    const auto ea = mean_se(end_a), eb = mean_se(end_b), ma = mean_se(mid_a), mb = mean_se(mid_b);
    CHECK(std::abs(ea.mean - rayleigh) < 3 * ea.se);
    CHECK(std::abs(eb.mean - rayleigh) < 3 * eb.se);
    CHECK(std::abs(ma.mean - mb.mean) < 3 * (ma.se + mb.se));
}

TEST_CASE("kernel chain sampler") {
    // radial Cauchy from y0 = 1 over t = 0.5: median against the CDF oracle
    const double t = 0.5;
    const auto grid = QuadratureGrid::panels(std::vector<double>{0, 0.5, 1, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 100, 150, 200, 300, 400}, 10);
    auto kern = [](double t1, double t2, double y1, double y2) { return kernels::cauchy_radial_kernel(t2 - t1, y1, y2); };
    auto cdf = [&](double m) {
        return quad_integrate([&](double z) { return kernels::cauchy_radial_kernel(t, 1.0, z); }, {0, m}, 1e-12).value;
    };
    double lo = 0, hi = 10;
    for (int i = 0; i < 60; ++i) ((cdf(0.5 * (lo + hi)) < 0.5) ? lo : hi) = 0.5 * (lo + hi);
    const double median = 0.5 * (lo + hi);

    RngStream rng(42, 3);
    const double obs[] = {t};
    std::vector<double> ys;
    for (int i = 0; i < 20000; ++i) ys.push_back(sample_markov_chain_from_kernel(rng, kern, grid, 0.0, 1.0, obs).values[0]);
    std::nth_element(ys.begin(), ys.begin() + 10000, ys.end());
    CHECK(std::abs(ys[10000] - median) < 0.03);

    // reversibility: (Y_0, Y_t) with Y_0 density proportional to y^2 on (0, 3), conditioned on Y_t < 3
    std::vector<double> first, second;
    for (int i = 0; i < 40000; ++i) {
        const double y0 = 3 * std::cbrt(rng.uniform());
        const double yt = sample_markov_chain_from_kernel(rng, kern, grid, 0.0, y0, obs).values[0];
        if (yt >= 3) continue;
        (i % 2 == 0 ? first : second).push_back(i % 2 == 0 ? y0 : yt);
    }
    CHECK(testsupport::ks_two_sample(first, second) < testsupport::ks_two_sample_critical_1pct(first.size(), second.size()));

    const kernels::DualHahnParams dh{2.0};
    auto dk = [dh](double t1, double t2, double y1, double y2) { return kernels::dual_hahn_kernel(t1, t2, y1, y2, dh); };
    const auto ygrid = QuadratureGrid::composite_gauss_legendre(0, 14, 56, 8);
    const double dobs[] = {0.3, 0.6, 1.2};
    for (int i = 0; i < 200; ++i) {
        const auto p = sample_markov_chain_from_kernel(rng, dk, ygrid, 0.0, 1.0, dobs);
        for (double v : p.values) REQUIRE(v > 0);
    }
}

TEST_CASE("CIR exact sampler") {
    const kernels::CIRParams p{0.5};
    RngStream rng(42, 4);
    const double obs[] = {0.5};
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) {
        const double x = sample_cir(rng, 1.0, obs, p).values[0];
        REQUIRE(x > 0);
        xs.push_back(x);
    }
    const testsupport::TabulatedCdf cdf([&](double x) { return kernels::cir_kernel(0.5, 1.0, x, p); }, 0, 30, 3000);
    CHECK(cdf.total() == doctest::Approx(1).epsilon(1e-5));
    CHECK(testsupport::ks_statistic(xs, cdf) < testsupport::ks_critical_1pct(xs.size()));

    std::vector<double> x1;
    std::gamma_distribution<double> stat(p.alpha + 1, 1.0);
    const double one[] = {1.0};
    for (int i = 0; i < 20000; ++i) x1.push_back(sample_cir(rng, stat(rng), one, p).values[0]);
    const auto m = mean_se(x1);
    CHECK(std::abs(m.mean - (p.alpha + 1)) < 3 * m.se);
    CHECK_THROWS_AS(sample_cir(rng, 0.0, obs, p), ParameterError);
}

TEST_CASE("birth-death sampler") {
    RngStream rng(42, 5);
    for (int i = 0; i < 100; ++i) {
        const auto path = sample_birth_death(rng, 0, 5.0, {0.0});
        if (path.times.size() > 1) REQUIRE(path.values[1] == 1);
    }
    const kernels::CIRParams p{1.0};
    const int n = 20000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += state_at(sample_birth_death(rng, 2, 0.5, p), 0.5) == 3;
    const double ph = double(hits) / n;
    CHECK(std::abs(ph - kernels::bd_kernel(0.5, 2, 3, p)) < 3 * std::sqrt(ph * (1 - ph) / n));

    std::vector<double> hold;
    for (int i = 0; i < n; ++i) {
        const auto path = sample_birth_death(rng, 3, 1.0, {0.0});
        hold.push_back(path.times.size() > 1 ? path.times[1] : 1.0);
    }
    const auto h = mean_se(hold);
    CHECK(std::abs(h.mean - 1.0 / 7) < 3 * h.se);

    // killing from 0 when alpha > 0
    bool killed = false;
    for (int i = 0; i < 200 && !killed; ++i) killed = state_at(sample_birth_death(rng, 0, 5.0, {2.0}), 5.0) == -1;
    CHECK(killed);
}

TEST_CASE("Levy samplers") {
    RngStream rng(42, 6);
    const double t1[] = {1.0}, t2[] = {2.0};
    std::vector<double> bm, po, ca;
    for (int i = 0; i < 20000; ++i) {
        const double b = sample_levy(rng, kernels::LevyExponent::brownian(1.0), t1).values[0];
        bm.push_back(b * b);
        po.push_back(sample_levy(rng, kernels::LevyExponent::poisson(), t2).values[0]);
        ca.push_back(sample_levy(rng, kernels::LevyExponent::cauchy(), t1).values[0]);
    }
    const auto v = mean_se(bm), n = mean_se(po);
    CHECK(std::abs(v.mean - 1) < 3 * v.se);
    CHECK(std::abs(n.mean - 2) < 3 * n.se);
    std::sort(ca.begin(), ca.end());
    CHECK(std::abs(ca[10000]) < 0.05);
    CHECK(std::abs(ca[15000] - ca[5000] - 2) < 0.1);

    const auto jumps = sample_poisson_jumps(rng, 3.0, 10.0);
    CHECK(std::is_sorted(jumps.begin(), jumps.end()));
    CHECK(jumps.back() <= 10.0);
    const auto custom = kernels::LevyExponent::custom("x", [](double y) { return cplx(y * y); });
    CHECK_THROWS_AS(sample_levy(rng, custom, t1), ParameterError);
}

TEST_CASE("Feynman-Kac weight") {
    PathSample path;
    for (int k = 0; k <= 4; ++k) {
        path.times.push_back(0.25 * k);
        path.values.push_back(1.0 + k);
    }
    CHECK(feynman_kac_weight(path, [](double) { return cplx(0); }) == cplx(1));
    PathSample flat = path;
    std::fill(flat.values.begin(), flat.values.end(), 0.3);
    CHECK(std::abs(feynman_kac_weight(flat, [](double) { return cplx(0.7); }) - std::exp(-0.7)) < 1e-15);

    // one jump of size 0.4 at w = 0.5: the value just before the jump is used
    const double dj = 0.4;
    const std::vector<double> step{0, 0, dj, dj, dj};
    auto rate = [](double x) { return cplx(x, 0.5 * x); };
    CHECK(std::abs(feynman_kac_weight(path, rate, step) - std::exp(-dj * rate(path.values[1]))) < 1e-15);

    RngStream rng(9, 9);
    const double obs[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    for (int i = 0; i < 100; ++i) {
        const auto p = sample_levy(rng, kernels::LevyExponent::brownian(1.0), obs);
        REQUIRE(std::abs(feynman_kac_weight(p, [](double x) { return cplx(x * x, 3 * x); })) <= 1.0);
    }
    const std::vector<double> decreasing{0, 1, 0.5, 2, 3};
    CHECK_THROWS_AS(feynman_kac_weight(path, rate, decreasing), ParameterError);
}
