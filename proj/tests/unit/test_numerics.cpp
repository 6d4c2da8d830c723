#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "duality/errors.hpp"
#include "duality/kernels.hpp"
#include "duality/numerics.hpp"
#include "duality/specfun.hpp"

using namespace duality;
using namespace duality::numerics;
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

TEST_CASE("quad_integrate examples") {
    auto r = quad_integrate([](double x) { return std::exp(-x); }, {0, inf}, 1e-12);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.achieved_tol <= 1e-12);
    r = quad_integrate([](double x) { return x * x * std::exp(-x * x / 2); }, {0, inf}, 1e-12);
    CHECK(r.value == doctest::Approx(std::sqrt(pi / 2)).epsilon(1e-12));
    r = quad_integrate([](double x) { return specfun::gamma_density(2.0, x); }, {0, inf}, 1e-12);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    r = quad_integrate([](double x) { return 1.0 / (1 + x * x); }, {-inf, inf, TailKind::algebraic}, 1e-10);
    CHECK(r.value == doctest::Approx(pi).epsilon(1e-10));
    r = quad_integrate([](double x) { return std::exp(-x * x); }, {-inf, inf}, 1e-12);
    CHECK(r.value == doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
    // narrow feature found through a breakpoint
    r = quad_integrate([](double x) { return std::exp(-1e4 * (x - 7.3) * (x - 7.3)); }, {0, inf, TailKind::exponential, {7.3}}, 1e-12);
    CHECK(r.value == doctest::Approx(std::sqrt(pi / 1e4)).epsilon(1e-10));
}

TEST_CASE("quad_integrate reports failure") {
    CHECK_THROWS_AS(quad_integrate([](double x) { return 1.0 / std::sqrt(x) + std::sin(1.0 / x); }, {0, 1}, 1e-14, 50),
                    AccuracyError);
    try {
        quad_integrate([](double x) { return std::sin(1.0 / x); }, {0, 1}, 1e-15, 20);
        FAIL("expected AccuracyError");
    } catch (const AccuracyError& e) {
        CHECK(e.achieved() > e.target());
        CHECK(e.target() == 1e-15);
    }
}

TEST_CASE("grid refinement converges") {
    auto f = [](double x) { return std::exp(-x) * std::cos(3 * x); };
    const double exact = (std::exp(-4.0) * (3 * std::sin(12.0) - std::cos(12.0)) + 1) / 10;
    double prev_err = 1;
    for (int n = 4; n <= 64; n *= 2) {
        const double err = std::abs(QuadratureGrid::trapezoid(0, 4, n).integrate(f) - exact);
        CHECK(err < prev_err / 3.5);
        prev_err = err;
    }
    const auto g = QuadratureGrid::gauss_legendre(20, -1, 3);
    double wsum = 0;
    for (double w : g.weights()) wsum += w;
    CHECK(wsum == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(QuadratureGrid({1.0, 0.5}, {1.0, 1.0}, {}), ParameterError);
    CHECK_THROWS_AS(QuadratureGrid({0.0, 0.5}, {1.0, -1.0}, {}), ParameterError);
    const auto lg = QuadratureGrid::gauss_laguerre(60, 1.5);
    CHECK(lg.integrate([](double x) { return specfun::gamma_density(1.5, x) * x; }) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("kernel matrices") {
    const auto g = QuadratureGrid::composite_gauss_legendre(0, 10, 100, 8);
    auto killed = build_kernel_matrix([](double a, double b) { return kernels::killed_bm_kernel(1.0, a, b); }, g, g);
    CHECK(killed.row_sums().maxCoeff() <= 1.0 + 1e-12);
    CHECK(killed.entries().minCoeff() >= 0.0);

    // Cauchy rows plus the analytic tail past the grid
    const auto yg = QuadratureGrid::composite_gauss_legendre(0, 30, 300, 8);
    auto cauchy = build_kernel_matrix([](double a, double b) { return kernels::cauchy_radial_kernel(0.5, a, b); }, yg, yg);
    for (std::size_t i = 0; i < yg.size(); i += 97) {
        const double y1 = yg.node(i);
        if (y1 > 10) continue;
        const double tail = quad_integrate([&](double y) { return kernels::cauchy_radial_kernel(0.5, y1, y); },
                                           {30, inf, TailKind::algebraic}, 1e-12).value;
        CHECK(std::abs(cauchy.row_sums()(Eigen::Index(i)) + tail - 1) < 1e-6);
    }

    // short-time CIR kernel reproduces a smooth function
    const double x0 = 1.3;
    const QuadratureGrid src({x0}, {1.0}, {});
    const auto fine = QuadratureGrid::composite_gauss_legendre(x0 - 0.03, x0 + 0.03, 600, 8);
    auto cir = build_kernel_matrix([](double a, double b) { return kernels::cir_kernel(1e-6, a, b, {0.5}); }, src, fine);
    RVector f(Eigen::Index(fine.size()));
    for (std::size_t j = 0; j < fine.size(); ++j) f(Eigen::Index(j)) = std::sin(fine.node(j));
    CHECK(std::abs(cir.apply(f)(0) - std::sin(x0)) < 1e-3);

    CHECK_THROWS_AS(build_kernel_matrix([](double, double) { return -1.0; }, src, src), KernelError);
}

TEST_CASE("parallel and serial kernel matrices agree") {
    const auto g = QuadratureGrid::composite_gauss_legendre(0, 12, 60, 8);
    auto k = [](double a, double b) { return kernels::excursion_kernel(0.2, 0.6, a, b); };
    const auto par = build_kernel_matrix(k, g, g), ser = build_kernel_matrix_serial(k, g, g);
    CHECK((par.entries() - ser.entries()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Chapman-Kolmogorov for homogeneous kernels") {
    // rows whose mass stays inside the grid
    auto ck = [](const Kernel2& half, const Kernel2& full, const QuadratureGrid& g, double row_limit) {
        const auto a = build_kernel_matrix(half, g, g);
        const auto b = build_kernel_matrix(full, g, g);
        const RMatrix diff = a.compose(a).entries() - b.entries();
        double worst = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.node(i) < row_limit) worst = std::max(worst, diff.row(Eigen::Index(i)).cwiseAbs().maxCoeff());
        return worst;
    };
    const auto xg = QuadratureGrid::composite_gauss_legendre(0, 14, 140, 8);
    CHECK(ck([](double a, double b) { return kernels::killed_bm_kernel(0.3, a, b); },
             [](double a, double b) { return kernels::killed_bm_kernel(0.6, a, b); }, xg, 9.0) < 1e-4);
    const auto yg = QuadratureGrid::composite_gauss_legendre(0, 40, 160, 8);
    // compare rows away from the truncation edge
    {
        const auto a = build_kernel_matrix([](double u, double v) { return kernels::cauchy_radial_kernel(0.5, u, v); }, yg, yg);
        const auto b = build_kernel_matrix([](double u, double v) { return kernels::cauchy_radial_kernel(1.0, u, v); }, yg, yg);
        const RMatrix diff = a.compose(a).entries() - b.entries();
        CHECK(diff.topRows(320).cwiseAbs().maxCoeff() < 1e-4);
    }
    const auto cg = QuadratureGrid::gauss_laguerre(150, 0.5);
    CHECK(ck([](double a, double b) { return kernels::cir_kernel(0.4, a, b, {0.5}); },
             [](double a, double b) { return kernels::cir_kernel(0.8, a, b, {0.5}); }, cg, 40.0) < 1e-4);
    const RMatrix q1 = kernels::bd_kernel_matrix(0.3, 60, 60, {1.0}), q2 = kernels::bd_kernel_matrix(0.6, 60, 60, {1.0});
    CHECK((q1 * q1 - q2).topLeftCorner(20, 20).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("inverse_cdf_sample") {
    const auto ug = QuadratureGrid::gauss_legendre(40, 0, 1);
    std::vector<double> ones(ug.size(), 1.0);
    CHECK(inverse_cdf_sample(ug, ones, 0.5) == doctest::Approx(0.5).epsilon(1e-12));

    const auto eg = QuadratureGrid::composite_gauss_legendre(0, 40, 800, 4);
    std::vector<double> ex(eg.size());
    for (std::size_t i = 0; i < eg.size(); ++i) ex[i] = std::exp(-eg.node(i));
    CHECK(std::abs(inverse_cdf_sample(eg, ex, 1 - std::exp(-1.0)) - 1.0) < 0.02);

    const auto cg = QuadratureGrid::composite_gauss_legendre(0, 400, 8000, 4);
    std::vector<double> q(cg.size());
    for (std::size_t i = 0; i < cg.size(); ++i) q[i] = kernels::cauchy_radial_kernel(0.5, 1.0, cg.node(i));
    const double med = inverse_cdf_sample(cg, q, 0.5);
    // CDF oracle: adaptive quadrature of the closed form up to the median, normalised on the same window
    auto mass = [](double upper) {
        return quad_integrate([](double y) { return kernels::cauchy_radial_kernel(0.5, 1.0, y); }, {0, upper, TailKind::algebraic, {1.0}}, 1e-12).value;
    };
    CHECK(std::abs(mass(med) / mass(400) - 0.5) < 2e-3);

    double prev = 0;
    for (int i = 1; i < 100; ++i) {
        const double x = inverse_cdf_sample(eg, ex, i / 100.0);
        CHECK(x >= prev);
        prev = x;
    }
    std::vector<double> zeros(ug.size(), 0.0);
    CHECK_THROWS_AS(inverse_cdf_sample(ug, zeros, 0.5), DegenerateDensityError);
}
