#include "duality/pairs.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "duality/errors.hpp"
#include "duality/specfun.hpp"

namespace duality::pairs {

namespace {

using numerics::KernelMatrix;
using numerics::QuadratureGrid;
using KernelPtr = std::shared_ptr<const KernelMatrix>;

constexpr double pi = std::numbers::pi;

// Thread-safe memo keyed on a pair of times rounded to 1e-12.
class KernelCache {
public:
    template <class Build>
    KernelPtr get(double a, double b, Build&& build) {
        const auto key = std::make_pair(std::llround(a * 1e12), std::llround(b * 1e12));
        {
            std::lock_guard lock(mu_);
            if (auto it = map_.find(key); it != map_.end()) return it->second;
        }
        auto value = std::make_shared<const KernelMatrix>(build());
        std::lock_guard lock(mu_);
        return map_.emplace(key, std::move(value)).first->second;
    }

private:
    std::mutex mu_;
    std::map<std::pair<long long, long long>, KernelPtr> map_;
};

QuadratureGrid uniform_panels(double a, double b, double width, int order, bool trunc_upper) {
    const int n = int(std::round((b - a) / width));
    auto g = QuadratureGrid::composite_gauss_legendre(a, b, n, order);
    return g.with_domain({a, b, false, trunc_upper});
}

void require_increasing(double a, double b, const char* what) {
    if (!(b > a)) throw ParameterError(std::string(what) + ": transition requires s1 < s2");
}

void require_resolved(double step, double min_step, const char* what) {
    if (step < min_step * (1 - 1e-9))
        throw AccuracyError(std::string(what) + ": increment below the grid resolution limit", step, min_step);
}

template <class Fn>
numerics::Kernel2 with_times(Fn fn, double a, double b) {
    return [fn, a, b](double x1, double x2) { return fn(a, b, x1, x2); };
}

SpectralDualityPair brownian_meander_like(std::string name, const GridOptions& opt, bool meander) {
    SpectralDualityPair p;
    p.name = std::move(name);
    const double xm = opt.x_max > 0 ? opt.x_max : 12.0;
    const auto x = uniform_panels(0.0, xm, 0.1, opt.order, true);
    const auto y = uniform_panels(0.0, 28.0, 0.1, opt.order, true);
    p.x_space = {x, [](double) { return 1.0; }, "x in (0, x_max)"};
    p.y_space = {y, [](double) { return 1.0; }, "y in (0, 28)"};
    p.forward = transforms::fourier_sine_operator(x, y);
    p.inverse = transforms::fourier_sine_operator(y, x);
    p.phi = [](double v) { return cplx(0.5 * v * v, 0.0); };
    p.psi = [](double v) { return cplx(v, 0.0); };
    if (meander)
        p.h = [](double s, double v) { return kernels::meander_doob_h(s, v); };
    else
        p.h = [](double s, double v) { return kernels::excursion_doob_h(s, v); };
    p.j = [](double, double v) { return v; };

    // 0.1-wide panels: Gaussian kernels resolve from ds ~ 0.002, the Cauchy kernel (width dt) from dt ~ 0.05
    p.min_x_step = 0.002;
    p.min_y_step = 0.05;
    auto xcache = std::make_shared<KernelCache>();
    p.x_transition = [xcache, x, meander, min = p.min_x_step](double s1, double s2) {
        require_increasing(s1, s2, "x_transition");
        require_resolved(s2 - s1, min, "x_transition");
        return xcache->get(s1, s2, [&] {
            return meander ? numerics::build_kernel_matrix(with_times(kernels::meander_kernel, s1, s2), x, x)
                           : numerics::build_kernel_matrix(with_times(kernels::excursion_kernel, s1, s2), x, x);
        });
    };
    auto ycache = std::make_shared<KernelCache>();
    p.y_transition = [ycache, y, min = p.min_y_step](double t1, double t2) {
        require_increasing(t1, t2, "y_transition");
        const double dt = t2 - t1;
        require_resolved(dt, min, "y_transition");
        return ycache->get(dt, 0.0, [&] {
            return numerics::build_kernel_matrix(
                [dt](double a, double b) { return kernels::cauchy_radial_kernel(dt, a, b); }, y, y);
        });
    };
    return p;
}

}  // namespace

SpectralDualityPair excursion_pair(const GridOptions& opt) { return brownian_meander_like("excursion", opt, false); }
SpectralDualityPair meander_pair(const GridOptions& opt) { return brownian_meander_like("meander", opt, true); }

QuadratureGrid cir_x_grid(int order, double x_max) {
    // geometric grading into 0 absorbs the x^alpha factor of mu_alpha; panels then grow away from it
    std::vector<double> breaks{0.0};
    for (int m = 14; m >= 1; --m) breaks.push_back(0.05 * std::pow(0.3, m));
    while (breaks.back() < x_max) {
        const double b = breaks.back();
        breaks.push_back(std::min(x_max, b + std::min(0.05 + 0.1 * b, 2.0)));
    }
    auto g = QuadratureGrid::panels(breaks, order);
    return g.with_domain({0.0, x_max, false, true});
}

SpectralDualityPair cir_pair(kernels::CIRParams cp, int kmax, const GridOptions& opt) {
    if (cp.alpha < 0) throw ParameterError("cir_pair: alpha must be nonnegative");
    SpectralDualityPair p;
    p.name = "cir";
    const auto x = cir_x_grid(std::max(opt.order, 10), opt.x_max > 0 ? opt.x_max : 60.0);
    const auto y = QuadratureGrid::integers(kmax);
    const double alpha = cp.alpha;
    p.x_space = {x, [cp](double v) { return kernels::cir_stationary_density(v, cp); }, "x in (0, x_max)"};
    p.y_space = {y, [alpha](double k) { return specfun::pochhammer_weight(int(k), alpha); }, "k in 0..kmax"};
    p.forward = transforms::laguerre_forward_operator(x, alpha, kmax);
    p.inverse = transforms::laguerre_inverse_operator(x, alpha, kmax);
    p.phi = [](double k) { return cplx(k, 0.0); };
    p.psi = [](double v) { return cplx(v, 0.0); };
    p.h = [](double, double) { return 1.0; };
    p.j = [](double, double) { return 1.0; };

    p.min_x_step = 0.005;
    auto xcache = std::make_shared<KernelCache>();
    p.x_transition = [xcache, x, cp, min = p.min_x_step](double s1, double s2) {
        require_increasing(s1, s2, "x_transition");
        const double ds = s2 - s1;
        require_resolved(ds, min, "x_transition");
        return xcache->get(ds, 0.0, [&] {
            return numerics::build_kernel_matrix(
                [ds, cp](double a, double b) { return kernels::cir_kernel(ds, a, b, cp); }, x, x);
        });
    };
    auto ycache = std::make_shared<KernelCache>();
    p.y_transition = [ycache, y, cp, kmax](double t1, double t2) {
        require_increasing(t1, t2, "y_transition");
        const double dt = t2 - t1;
        return ycache->get(dt, 0.0, [&] {
            return KernelMatrix(y, y, kernels::bd_kernel_matrix(dt, kmax + 1, kmax + 1, cp));
        });
    };
    return p;
}

namespace {

numerics::Kernel2 levy_density(const kernels::LevyExponent& e, double t, double sign) {
    using Kind = kernels::LevyExponent::Kind;
    switch (e.kind()) {
        case Kind::brownian: {
            const double var = e.param1() * t;
            return [var, sign](double a, double b) {
                const double d = sign * (b - a);
                return std::exp(-d * d / (2 * var)) / std::sqrt(2 * pi * var);
            };
        }
        case Kind::drifted_scaled_brownian: {
            // exponent lambda y^2 - i beta y: variance 2 lambda t, mean beta t
            const double var = 2 * e.param1() * t, mean = e.param2() * t;
            return [var, mean, sign](double a, double b) {
                const double d = sign * (b - a) - mean;
                return std::exp(-d * d / (2 * var)) / std::sqrt(2 * pi * var);
            };
        }
        case Kind::cauchy:
            return [t, sign](double a, double b) {
                const double d = sign * (b - a);
                return t / (pi * (t * t + d * d));
            };
        default:
            throw ParameterError("levy_pair: no transition density for exponent " + e.name());
    }
}

// Smallest time step whose density the trapezoid rule with spacing h integrates to about 1e-8 or better.
double levy_min_step(const kernels::LevyExponent& e, double h) {
    using Kind = kernels::LevyExponent::Kind;
    switch (e.kind()) {
        case Kind::brownian: return 1.5 * h * h / e.param1();
        case Kind::drifted_scaled_brownian: return 0.75 * h * h / e.param1();
        case Kind::cauchy: return 3 * h;
        default: return 0.0;
    }
}

}  // namespace

SpectralDualityPair levy_pair(const kernels::LevyExponent& xe, const kernels::LevyExponent& ye, const GridOptions&) {
    SpectralDualityPair p;
    p.name = "levy(" + xe.name() + "," + ye.name() + ")";
    auto x = QuadratureGrid::trapezoid(-20.0, 20.0, 800);
    x = x.with_domain({-20.0, 20.0, true, true});
    // spacing 1/8 keeps integer shifts on the grid
    auto y = QuadratureGrid::trapezoid(-16.0, 16.0, 256);
    y = y.with_domain({-16.0, 16.0, true, true});
    p.x_space = {x, [](double) { return 1.0; }, "x in [-20, 20]"};
    p.y_space = {y, [](double) { return 1.0; }, "y in [-16, 16]"};
    p.forward = transforms::fourier_line_operator(x, y, transforms::Direction::forward);
    p.inverse = transforms::fourier_line_operator(y, x, transforms::Direction::inverse);
    p.phi = [xe](double v) { return xe(v); };
    p.psi = [ye](double v) { return ye(v); };
    p.h = [](double, double) { return 1.0; };
    p.j = [](double, double) { return 1.0; };

    p.min_x_step = levy_min_step(xe, 0.05);
    p.min_y_step = ye.kind() == kernels::LevyExponent::Kind::poisson ? 0.0 : levy_min_step(ye, 0.125);
    auto xcache = std::make_shared<KernelCache>();
    p.x_transition = [xcache, x, xe, min = p.min_x_step](double s1, double s2) {
        require_increasing(s1, s2, "x_transition");
        const double ds = s2 - s1;
        require_resolved(ds, min, "x_transition");
        // P_s f(x) = E f(x + X_s)
        return xcache->get(ds, 0.0, [&] { return numerics::build_kernel_matrix(levy_density(xe, ds, 1.0), x, x); });
    };
    auto ycache = std::make_shared<KernelCache>();
    p.y_transition = [ycache, y, ye, min = p.min_y_step](double t1, double t2) {
        require_increasing(t1, t2, "y_transition");
        const double dt = t2 - t1;
        require_resolved(dt, min, "y_transition");
        return ycache->get(dt, 0.0, [&] {
            if (ye.kind() != kernels::LevyExponent::Kind::poisson)
                // Q_t g(y) = E g(y - Y_t)
                return numerics::build_kernel_matrix(levy_density(ye, dt, -1.0), y, y);
            const Eigen::Index n = Eigen::Index(y.size());
            RMatrix m = RMatrix::Zero(n, n);
            constexpr int shift = 8;
            double pm = std::exp(-dt);
            for (int k = 0; k * shift < n; ++k) {
                if (k > 0) pm *= dt / k;
                for (Eigen::Index i = k * shift; i < n; ++i) m(i, i - k * shift) = pm;
            }
            return KernelMatrix(y, y, std::move(m));
        });
    };
    return p;
}

SpectralDualityPair kl_pair(kernels::DualHahnParams dp, const GridOptions& opt) {
    SpectralDualityPair p;
    p.name = "kl-dualhahn";
    auto x = QuadratureGrid::composite_gauss_legendre(-20.0, 8.0, 56, opt.order);
    x = x.with_domain({-20.0, 8.0, true, true});
    std::vector<double> yb;
    for (double b = 0; b < 14.0 + 1e-9; b += 0.5) yb.push_back(b);
    auto y = QuadratureGrid::panels(yb, std::max(opt.order, 12));
    y = y.with_domain({0.0, 14.0, false, true});
    auto table = std::make_shared<const kernels::BesselTable>(y, x);
    p.x_space = {x, [](double) { return 1.0; }, "x in [-20, 8]"};
    p.y_space = {y, [](double v) { return kernels::kl_nu_density(v); }, "y in (0, 14)"};
    p.forward = transforms::kl_forward_operator(*table);
    p.inverse = transforms::kl_inverse_operator(*table);
    p.phi = [](double v) { return cplx(v * v, 0.0); };
    p.psi = [](double v) { return cplx(-v, 0.0); };
    p.h = [](double, double) { return 1.0; };
    p.j = [dp](double t, double v) { return kernels::dual_hahn_j(t, v, dp); };
    p.contraction_violated = true;
    p.t_limit = dp.b;
    p.x_tail_weight = [](double v) { return v > 6.5 ? 0.0 : specfun::bessel_k_imag(0.0, std::exp(v)); };

    auto xcache = std::make_shared<KernelCache>();
    p.x_transition = [xcache, table](double s1, double s2) {
        require_increasing(s1, s2, "x_transition");
        const double ds = s2 - s1;
        return xcache->get(ds, 0.0, [&] { return kernels::yakubovich_matrix(ds, *table); });
    };
    auto ycache = std::make_shared<KernelCache>();
    p.y_transition = [ycache, y, dp](double t1, double t2) {
        require_increasing(t1, t2, "y_transition");
        if (t2 > dp.b) throw AdmissibilityError("dual Hahn transition beyond t = b");
        return ycache->get(t1, t2, [&] {
            return numerics::build_kernel_matrix(
                [=](double a, double b) { return kernels::dual_hahn_kernel(t1, t2, a, b, dp); }, y, y);
        });
    };
    return p;
}

}  // namespace duality::pairs
