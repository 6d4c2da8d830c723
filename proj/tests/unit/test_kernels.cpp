#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "duality/errors.hpp"
#include "duality/kernels.hpp"
#include "duality/specfun.hpp"

using namespace duality;
using namespace duality::kernels;
using numerics::quad_integrate;
using numerics::TailKind;
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

TEST_CASE("killed Brownian kernel") {
    CHECK(killed_bm_kernel(0.7, 1.1, 2.3) == killed_bm_kernel(0.7, 2.3, 1.1));
    CHECK(killed_bm_kernel(1, 1, 1) == doctest::Approx((1 - std::exp(-2.0)) / std::sqrt(2 * pi)).epsilon(1e-14));
    for (double t : {0.3, 1.0})
        for (auto [a, b] : {std::pair{0.5, 1.5}, {1.0, 1.0}, {2.0, 0.3}}) {
            const auto r = quad_integrate([&](double y) { return std::exp(-t * y * y / 2) * std::sin(a * y) * std::sin(b * y); }, {0, inf}, 1e-13);
            CHECK(std::abs(2 / pi * r.value - killed_bm_kernel(t, a, b)) < 1e-8);
        }
}

TEST_CASE("Doob factors") {
    for (double x : {0.1, 1.0, 3.0}) CHECK(excursion_doob_h(0, x) == doctest::Approx(x * std::exp(-x * x / 2) / std::sqrt(2 * pi)));
    const auto r = quad_integrate([](double x) { return std::sqrt(8 * pi) * excursion_doob_h(0.3, x) * excursion_doob_h(0.7, x); }, {0, inf}, 1e-13);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(excursion_doob_h(0.4, 1e-6) / excursion_doob_h(0.4, 2e-6) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(excursion_doob_h(1.0, 1.0), DomainError);

    for (double x : {0.01, 1.0, 50.0}) CHECK(meander_doob_h(1.0, x) == 0.5);
    CHECK(meander_doob_h(0.4, 30.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double s : {0.2, 0.7})
        for (double x : {0.3, 1.2}) {
            const auto r = quad_integrate([&](double y) { return killed_bm_kernel(1 - s, x, y); }, {0, inf, TailKind::exponential, {x}}, 1e-13);
            CHECK(std::abs(0.5 * r.value - meander_doob_h(s, x)) < 1e-8);
        }
}

namespace {
double ck_error(double (*k)(double, double, double, double), double s0, double s1, double s2, double x0) {
    // compare int k(s0,s1,x0,z) k(s1,s2,z,x) dz with k(s0,s2,x0,x) at a few x
    double worst = 0;
    for (double x : {0.3, 0.9, 1.6}) {
        const auto r = quad_integrate([&](double z) { return k(s0, s1, x0, z) * k(s1, s2, z, x); }, {0, inf, TailKind::exponential, {x}}, 1e-12);
        worst = std::max(worst, std::abs(r.value - k(s0, s2, x0, x)));
    }
    return worst;
}
}  // namespace

TEST_CASE("excursion kernel") {
    const auto r = quad_integrate([](double x) { return excursion_kernel(0, 0.5, 0, x); }, {0, inf}, 1e-13);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ck_error(excursion_kernel, 0.25, 0.5, 0.75, 0.8) < 1e-5);
    CHECK(ck_error(excursion_kernel, 0.0, 0.25, 0.5, 0.0) < 1e-5);
    for (double x : {0.2, 0.8, 2.0}) CHECK(excursion_kernel(0, 0.3, 0, x) == doctest::Approx(excursion_kernel(0, 0.7, 0, x)).epsilon(1e-14));
    const auto row = quad_integrate([](double x) { return excursion_kernel(0.2, 0.6, 1.1, x); }, {0, inf, TailKind::exponential, {1.1}}, 1e-13);
    CHECK(row.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(excursion_kernel(0.2, 0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("meander kernel") {
    const auto r = quad_integrate([](double x) { return meander_kernel(0, 0.5, 0, x); }, {0, inf}, 1e-13);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ck_error(meander_kernel, 0.0, 0.3, 1.0, 0.0) < 1e-5);
    CHECK(ck_error(meander_kernel, 0.2, 0.5, 0.9, 0.7) < 1e-5);
    for (double x : {0.2, 1.0, 2.5}) CHECK(meander_kernel(0, 1.0, 0, x) == doctest::Approx(x * std::exp(-x * x / 2)).epsilon(1e-13));
    const auto ray = quad_integrate([](double x) { return meander_kernel(0, 1.0, 0, x); }, {0, inf}, 1e-13);
    CHECK(ray.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(meander_kernel(0.1, 0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("radial Cauchy kernel") {
    for (double t : {0.2, 0.5, 2.0})
        for (auto [a, b] : {std::pair{0.5, 1.5}, {1.0, 1.0}, {3.0, 0.2}}) {
            CHECK(a * a * cauchy_radial_kernel(t, a, b) == doctest::Approx(b * b * cauchy_radial_kernel(t, b, a)).epsilon(1e-15));
            const auto r = quad_integrate([&](double x) { return std::exp(-t * x) * std::sin(a * x) * std::sin(b * x); }, {0, inf}, 1e-14);
            const double integral_form = b / a * 2 / pi * r.value;
            CHECK(std::abs(integral_form - cauchy_radial_kernel(t, a, b)) < 1e-8);
        }
    const auto m = quad_integrate([](double y) { return cauchy_radial_kernel(0.5, 1.0, y); }, {0, inf, TailKind::algebraic, {1.0}}, 1e-10);
    CHECK(std::abs(m.value - 1) < 1e-6);
}

TEST_CASE("CIR kernel") {
    CHECK(std::abs(cir_kernel(0.7, 1.2, 2.0, {0.5}) / cir_kernel_series(0.7, 1.2, 2.0, {0.5}) - 1) < 1e-8);
    for (double alpha : {0.0, 1.0})
        for (double s : {0.5, 1.0, 2.0})
            for (double x1 : {0.2, 1.0, 3.0})
                for (double x2 : {0.4, 2.5}) {
                    const double c = cir_kernel(s, x1, x2, {alpha}), r = cir_kernel_series(s, x1, x2, {alpha});
                    CHECK(std::abs(c / r - 1) < 1e-8);
                }
    for (double x2 : {0.5, 2.0}) {
        const auto r = quad_integrate([&](double x1) { return cir_stationary_density(x1, {1.5}) * cir_kernel(0.6, x1, x2, {1.5}); }, {0, inf, TailKind::exponential, {x2}}, 1e-12);
        CHECK(std::abs(r.value - cir_stationary_density(x2, {1.5})) < 1e-6);
    }
    const auto row = quad_integrate([](double x) { return cir_kernel(1.0, 1.3, x, {0.0}); }, {0, inf, TailKind::exponential, {1.3}}, 1e-12);
    CHECK(std::abs(row.value - 1) < 1e-8);
    for (int k = 0; k <= 10; ++k) {
        const double x = 1.7, s = 0.5, a = 0.5;
        const auto r = quad_integrate([&](double z) { return cir_kernel(s, x, z, {a}) * specfun::laguerre(k, a, z); }, {0, inf, TailKind::exponential, {x}}, 1e-12);
        CHECK(std::abs(r.value - std::exp(-k * s) * specfun::laguerre(k, a, x)) < 1e-6);
    }
    // small s survives through the scaled Bessel function
    CHECK(std::isfinite(cir_kernel(1e-6, 1.0, 1.0001, {0.5})));
    CHECK(cir_kernel(1e-6, 1.0, 1.0, {0.5}) == doctest::Approx(1 / std::sqrt(4 * pi * 1e-6)).epsilon(1e-3));
}

TEST_CASE("birth-death kernel") {
    CHECK(std::abs(bd_kernel(1e-4, 3, 4, {0.0}) / 4e-4 - 1) < 0.1);
    // alpha = 0 is conservative; for alpha > 0 state 0 leaks at rate alpha and the
    // surviving mass is int e^{-(1+t)x} L_2^{(1)}(x) dx = 26/27 for (t, k1, alpha) = (0.5, 2, 1)
    double row0 = 0, row1 = 0;
    for (int k2 = 0; k2 <= 80; ++k2) {
        row0 += bd_kernel(0.5, 2, k2, {0.0});
        row1 += bd_kernel(0.5, 2, k2, {1.0});
    }
    CHECK(std::abs(row0 - 1) < 1e-6);
    CHECK(std::abs(row1 - 26.0 / 27.0) < 1e-6);
    for (double a : {0.0, 0.5, 2.0}) {
        const RMatrix q = bd_kernel_matrix(0.7, 20, 20, {a});
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) {
                CHECK(q(i, j) == doctest::Approx(bd_kernel(0.7, i, j, {a})).epsilon(1e-10));
                // detailed balance with respect to pi_k
                CHECK(q(i, j) / specfun::pochhammer_weight(j, a) == doctest::Approx(q(j, i) / specfun::pochhammer_weight(i, a)).epsilon(1e-10));
            }
    }
    // generator: death rate k + alpha
    CHECK(std::abs(bd_kernel(1e-5, 3, 2, {0.5}) / (3.5e-5) - 1) < 0.01);
}

TEST_CASE("Yakubovich kernel") {
    const double a = yakubovich_kernel(1.0, -0.3, 0.8), b = yakubovich_kernel(1.0, 0.8, -0.3);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    // Chapman-Kolmogorov via a Bessel table
    const auto yg = numerics::QuadratureGrid::composite_gauss_legendre(0, 12, 24, 16);
    const auto xg = numerics::QuadratureGrid::composite_gauss_legendre(-14, 5, 76, 12);
    const BesselTable table(yg, xg);
    const auto half = yakubovich_matrix(0.5, table), full = yakubovich_matrix(1.0, table);
    const RMatrix diff = half.compose(half).entries() - full.entries();
    double worst = 0;
    for (std::size_t r = 0; r < xg.size(); ++r)
        if (xg.node(r) > -9 && xg.node(r) < 3) worst = std::max(worst, diff.row(Eigen::Index(r)).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-4);
    // sub-Markov rows
    const RVector rows = full.row_sums();
    for (std::size_t r = 0; r < xg.size(); ++r)
        if (xg.node(r) > -9) CHECK(rows(Eigen::Index(r)) <= 1.0 + 1e-6);
    const std::size_t mid = std::size_t(std::lower_bound(xg.nodes().begin(), xg.nodes().end(), 0.0) - xg.nodes().begin());
    CHECK(rows(Eigen::Index(mid)) > 0.2);
    // matrix entry matches the pointwise kernel
    const std::size_t i = 500, j = 620;
    CHECK(full.entries()(i, j) / xg.weight(j) == doctest::Approx(yakubovich_kernel(1.0, xg.node(i), xg.node(j))).epsilon(1e-7));
}

TEST_CASE("dual Hahn kernel") {
    const DualHahnParams p{2.0};
    const auto m = quad_integrate([&](double y) { return dual_hahn_kernel(0, 0.5, 1.0, y, p); }, {0, inf, TailKind::algebraic, {1.0}}, 1e-9);
    CHECK(std::abs(m.value - 1) < 1e-5);
    const auto w = quad_integrate([&](double y) { return dual_hahn_kernel(0.3, 0.31, 2.0, y, p); }, {1.5, 2.5, TailKind::exponential, {2.0}}, 1e-9);
    CHECK(w.value > 0.9);
    CHECK_THROWS_AS(dual_hahn_kernel(0.1, 2.0, 1.0, 1.0, p), DomainError);
    CHECK_THROWS_AS(dual_hahn_j(2.5, 1.0, p), DomainError);
    CHECK(dual_hahn_j(0.0, 0.0, p) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Levy exponents") {
    using LE = LevyExponent;
    CHECK(levy_exponent_eval(LE::brownian(1.0), 2.0) == cplx(2.0, 0.0));
    CHECK(std::abs(levy_exponent_eval(LE::poisson(), 0.0)) == 0.0);
    CHECK(levy_exponent_eval(LE::cauchy(), -3.0) == cplx(3.0, 0.0));
    CHECK(std::abs(levy_exponent_eval(LE::drifted_scaled_brownian(0.4, 0.2), 1.5) - cplx(0.9, -0.3)) < 1e-15);
    for (const auto& e : {LE::brownian(0.7), LE::drifted_scaled_brownian(0.4, 0.2), LE::cauchy(), LE::poisson(), LE::compound_poisson_normal(2.0, 0.5)})
        for (double y = -10; y <= 10; y += 0.173) CHECK(e(y).real() >= 0.0);
    const auto c = LE::custom("quartic", [](double y) { return cplx(y * y * y * y, 0); });
    CHECK(c(2.0) == cplx(16.0, 0));
}
