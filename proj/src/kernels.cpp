#include "duality/kernels.hpp"

#include <cmath>
#include <numbers>

#include "duality/errors.hpp"
#include "duality/specfun.hpp"

namespace duality::kernels {

namespace {
constexpr double pi = std::numbers::pi;

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

// log of the killed kernel, -inf when it vanishes
double log_killed_bm(double t, double x1, double x2) {
    const double d = x1 - x2;
    const double tail = -std::expm1(-2.0 * x1 * x2 / t);
    if (tail <= 0.0) return -INFINITY;
    return -0.5 * std::log(2.0 * pi * t) - d * d / (2.0 * t) + std::log(tail);
}

double log_sinh(double x) { return x > 20 ? x - std::log(2.0) + std::log1p(-std::exp(-2 * x)) : std::log(std::sinh(x)); }

}  // namespace

double killed_bm_kernel(double t, double x1, double x2) {
    require_positive(t, "killed_bm_kernel: t");
    if (!(x1 > 0 && x2 > 0)) throw DomainError("killed_bm_kernel: states must be positive");
    return std::exp(log_killed_bm(t, x1, x2));
}

double log_excursion_doob_h(double s, double x) {
    if (!(s >= 0.0 && s < 1.0)) throw DomainError("excursion_doob_h: requires 0 <= s < 1");
    if (!(x > 0)) return -INFINITY;
    const double r = 1.0 - s;
    return std::log(x) - x * x / (2.0 * r) - 0.5 * std::log(2.0 * pi * r * r * r);
}

double excursion_doob_h(double s, double x) { return std::exp(log_excursion_doob_h(s, x)); }

double meander_doob_h(double s, double x) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("meander_doob_h: requires 0 <= s <= 1");
    if (s == 1.0) return 0.5;
    return 0.5 * std::erf(x / std::sqrt(2.0 * (1.0 - s)));
}

double excursion_entrance_density(double s, double x) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("excursion_entrance_density: requires 0 < s < 1");
    if (!(x > 0)) return 0.0;
    return std::exp(0.5 * std::log(8.0 * pi) + log_excursion_doob_h(s, x) + log_excursion_doob_h(1.0 - s, x));
}

double meander_entrance_density(double s, double x) {
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("meander_entrance_density: requires 0 < s <= 1");
    if (!(x > 0)) return 0.0;
    return std::sqrt(8.0 * pi) * excursion_doob_h(1.0 - s, x) * meander_doob_h(s, x);
}

double excursion_kernel(double s1, double s2, double x1, double x2) {
    if (!(s1 >= 0.0 && s1 < s2 && s2 < 1.0)) throw DomainError("excursion_kernel: requires 0 <= s1 < s2 < 1");
    if (x1 == 0.0) {
        if (s1 != 0.0) throw DomainError("excursion_kernel: x1 = 0 only allowed at s1 = 0");
        return excursion_entrance_density(s2, x2);
    }
    if (!(x1 > 0 && x2 > 0)) throw DomainError("excursion_kernel: states must be positive");
    return std::exp(log_excursion_doob_h(s2, x2) - log_excursion_doob_h(s1, x1) + log_killed_bm(s2 - s1, x1, x2));
}

double meander_kernel(double s1, double s2, double x1, double x2) {
    if (!(s1 >= 0.0 && s1 < s2 && s2 <= 1.0)) throw DomainError("meander_kernel: requires 0 <= s1 < s2 <= 1");
    if (x1 == 0.0) {
        if (s1 != 0.0) throw DomainError("meander_kernel: x1 = 0 only allowed at s1 = 0");
        return meander_entrance_density(s2, x2);
    }
    if (!(x1 > 0 && x2 > 0)) throw DomainError("meander_kernel: states must be positive");
    const double ratio = meander_doob_h(s2, x2) / meander_doob_h(s1, x1);
    return ratio * std::exp(log_killed_bm(s2 - s1, x1, x2));
}

double cauchy_radial_kernel(double t, double y1, double y2) {
    require_positive(t, "cauchy_radial_kernel: t");
    if (!(y1 > 0 && y2 > 0)) throw DomainError("cauchy_radial_kernel: states must be positive");
    // difference of the two Lorentzians, written without cancellation
    const double dm = y1 - y2, dp = y1 + y2;
    return 4.0 * t * y2 * y2 / (pi * (t * t + dm * dm) * (t * t + dp * dp));
}

double cir_stationary_density(double x, CIRParams p) { return specfun::gamma_density(p.alpha, x); }

double cir_kernel(double s, double x1, double x2, CIRParams p) {
    require_positive(s, "cir_kernel: s");
    if (!(x1 > 0 && x2 > 0)) throw DomainError("cir_kernel: states must be positive");
    if (p.alpha < 0) throw ParameterError("cir_kernel: alpha must be nonnegative");
    const double a = p.alpha;
    const double em = std::exp(-s);
    const double c = -1.0 / std::expm1(-s);
    const double z = 2.0 * c * std::sqrt(x1 * x2 * em);
    const double log_i = std::log(specfun::bessel_i_scaled(a, z)) + z;
    const double lp = std::log(c) + 0.5 * a * (s + std::log(x2) - std::log(x1)) - c * (x1 * em + x2) + log_i;
    return std::exp(lp);
}

double cir_kernel_series(double s, double x1, double x2, CIRParams p, int terms) {
    require_positive(s, "cir_kernel_series: s");
    const auto l1 = specfun::laguerre_sequence(terms - 1, p.alpha, x1);
    const auto l2 = specfun::laguerre_sequence(terms - 1, p.alpha, x2);
    double sum = 0;
    for (int k = 0; k < terms; ++k)
        sum += std::exp(-k * s) * l1[std::size_t(k)] * l2[std::size_t(k)] * specfun::pochhammer_weight(k, p.alpha);
    return cir_stationary_density(x2, p) * sum;
}

namespace {

// rows k = 0..kmax of L_k(x_i) * exp(0.5 log w_i), with overflow-safe scaling
RMatrix scaled_laguerre_basis(int kmax, double alpha, const std::vector<double>& x, const std::vector<double>& half_logw) {
    RMatrix b(kmax + 1, Eigen::Index(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        double prev = 0.0, cur = 1.0, ls = half_logw[i];
        b(0, Eigen::Index(i)) = std::exp(ls);
        for (int n = 0; n < kmax; ++n) {
            const double next = ((2.0 * n + 1.0 + alpha - x[i]) * cur - (n + alpha) * prev) / (n + 1.0);
            prev = cur;
            cur = next;
            const double m = std::abs(cur);
            if (m > 1e100) {
                cur /= m;
                prev /= m;
                ls += std::log(m);
            }
            b(n + 1, Eigen::Index(i)) = cur * std::exp(ls);
        }
    }
    return b;
}

}  // namespace

RMatrix bd_kernel_matrix(double t, int rows, int cols, CIRParams p) {
    require_positive(t, "bd_kernel: t");
    if (rows < 1 || cols < 1) throw ParameterError("bd_kernel_matrix: empty shape");
    const double a = p.alpha;
    const int kmax = std::max(rows, cols) - 1;
    const int n = 2 * kmax + 40;
    const auto& rule = numerics::gauss_laguerre_rule(n, a);
    // u = (1+t) x turns e^{-tx} mu_alpha(x) dx into (1+t)^{-(alpha+1)} mu_alpha(u) du
    std::vector<double> x(static_cast<std::size_t>(n)), hw(static_cast<std::size_t>(n));
    const double lg = std::lgamma(a + 1.0);
    for (int i = 0; i < n; ++i) {
        x[std::size_t(i)] = rule.nodes[std::size_t(i)] / (1.0 + t);
        hw[std::size_t(i)] = 0.5 * (rule.log_weights[std::size_t(i)] - lg);
    }
    const RMatrix basis = scaled_laguerre_basis(kmax, a, x, hw);
    RMatrix q = basis.topRows(rows) * basis.topRows(cols).transpose();
    q *= std::pow(1.0 + t, -(a + 1.0));
    for (int k2 = 0; k2 < cols; ++k2) q.col(k2) *= specfun::pochhammer_weight(k2, a);
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            if (q(i, j) < -1e-10) throw AccuracyError("bd_kernel: negative transition probability", q(i, j), 0.0);
            q(i, j) = std::max(q(i, j), 0.0);
        }
    return q;
}

double bd_kernel(double t, int k1, int k2, CIRParams p) {
    if (k1 < 0 || k2 < 0) throw DomainError("bd_kernel: states must be nonnegative");
    require_positive(t, "bd_kernel: t");
    const double a = p.alpha;
    const int n = 2 * std::max(k1, k2) + 40;
    const auto& rule = numerics::gauss_laguerre_rule(n, a);
    const double lg = std::lgamma(a + 1.0);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rule.nodes[std::size_t(i)] / (1.0 + t);
        const double w = std::exp(rule.log_weights[std::size_t(i)] - lg);
        sum += w * specfun::laguerre(k1, a, x) * specfun::laguerre(k2, a, x);
    }
    const double v = sum * std::pow(1.0 + t, -(a + 1.0)) * specfun::pochhammer_weight(k2, a);
    if (v < -1e-10) throw AccuracyError("bd_kernel: negative transition probability", v, 0.0);
    return std::max(v, 0.0);
}

double log_kl_nu_density(double y) { return std::log(2.0 / (pi * pi) * y) + log_sinh(pi * y); }

double kl_nu_density(double y) {
    if (y <= 0) return 0.0;
    return std::exp(log_kl_nu_density(y));
}

BesselTable::BesselTable(numerics::QuadratureGrid y_grid, numerics::QuadratureGrid x_grid)
    : y_(std::move(y_grid)), x_(std::move(x_grid)), k_(Eigen::Index(y_.size()), Eigen::Index(x_.size())) {
    const long ny = long(y_.size()), nx = long(x_.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (long j = 0; j < nx; ++j) {
        try {
            const double z = std::exp(x_.node(std::size_t(j)));
            for (long i = 0; i < ny; ++i) k_(i, j) = specfun::bessel_k_imag(y_.node(std::size_t(i)), z);
        } catch (...) {
#pragma omp critical(duality_bessel_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

double yakubovich_kernel(double s, double x1, double x2) {
    require_positive(s, "yakubovich_kernel: s");
    const double z1 = std::exp(x1), z2 = std::exp(x2);
    const double ymax = std::sqrt(40.0 / s);
    auto integrand = [&](double y) {
        if (y <= 0) return 0.0;
        return std::exp(-s * y * y + log_kl_nu_density(y)) * specfun::bessel_k_imag(y, z1) *
               specfun::bessel_k_imag(y, z2);
    };
    const auto r = numerics::quad_integrate(integrand, {0.0, ymax}, 1e-10);
    return std::max(r.value, 0.0);
}

numerics::KernelMatrix yakubovich_matrix(double s, const BesselTable& table) {
    require_positive(s, "yakubovich_matrix: s");
    const auto& yg = table.y_grid();
    RVector d(Eigen::Index(yg.size()));
    for (std::size_t i = 0; i < yg.size(); ++i) {
        const double y = yg.node(i);
        d(Eigen::Index(i)) = y > 0 ? std::exp(-s * y * y + log_kl_nu_density(y)) * yg.weight(i) : 0.0;
    }
    const RMatrix& k = table.values();
    RMatrix m = k.transpose() * d.asDiagonal() * k;
    const auto& xg = table.x_grid();
    for (std::size_t j = 0; j < xg.size(); ++j) m.col(Eigen::Index(j)) *= xg.weight(j);
    return numerics::KernelMatrix(xg, xg, std::move(m));
}

double dual_hahn_j(double t, double y, DualHahnParams p) {
    if (!(t >= 0.0 && t < p.b)) throw DomainError("dual_hahn_j: requires 0 <= t < b");
    return std::exp((p.b - t - 2.0) * std::log(2.0) + specfun::log_gamma_abs2(p.b - t, y));
}

double dual_hahn_kernel(double t1, double t2, double y1, double y2, DualHahnParams p) {
    if (!(t1 >= 0.0 && t1 < t2)) throw DomainError("dual_hahn_kernel: requires 0 <= t1 < t2");
    if (!(t2 < p.b)) throw DomainError("dual_hahn_kernel: requires t2 < b");
    if (!(y1 > 0 && y2 > 0)) throw DomainError("dual_hahn_kernel: states must be positive");
    const double d = t2 - t1;
    const double lq = -std::log(8.0) - std::lgamma(d) + specfun::log_gamma_abs2(d, y1 + y2) +
                      specfun::log_gamma_abs2(d, y1 - y2) + specfun::log_gamma_abs2(p.b - t2, y2) -
                      specfun::log_gamma_abs2(p.b - t1, y1) + log_kl_nu_density(y2);
    return std::exp(lq);
}

LevyExponent LevyExponent::brownian(double sigma2) {
    if (!(sigma2 >= 0)) throw ParameterError("brownian exponent: sigma2 must be nonnegative");
    return {Kind::brownian, sigma2, 0.0, "bm"};
}
LevyExponent LevyExponent::drifted_scaled_brownian(double lambda, double beta) {
    if (!(lambda >= 0)) throw ParameterError("drifted exponent: lambda must be nonnegative");
    return {Kind::drifted_scaled_brownian, lambda, beta, "drifted-bm"};
}
LevyExponent LevyExponent::cauchy() { return {Kind::cauchy, 0.0, 0.0, "cauchy"}; }
LevyExponent LevyExponent::poisson() { return {Kind::poisson, 0.0, 0.0, "poisson"}; }
LevyExponent LevyExponent::compound_poisson_normal(double rate, double jump_sigma) {
    if (!(rate >= 0)) throw ParameterError("compound poisson exponent: rate must be nonnegative");
    return {Kind::compound_poisson_normal, rate, jump_sigma, "compound-poisson-normal"};
}
LevyExponent LevyExponent::custom(std::string name, std::function<cplx(double)> phi) {
    LevyExponent e(Kind::custom, 0.0, 0.0, std::move(name));
    e.custom_ = std::move(phi);
    return e;
}

cplx LevyExponent::operator()(double y) const {
    switch (kind_) {
        case Kind::brownian: return 0.5 * p1_ * y * y;
        case Kind::drifted_scaled_brownian: return {p1_ * y * y, -p2_ * y};
        case Kind::cauchy: return std::abs(y);
        case Kind::poisson: return 1.0 - std::exp(cplx(0.0, y));
        case Kind::compound_poisson_normal: return p1_ * (1.0 - std::exp(-0.5 * p2_ * p2_ * y * y));
        case Kind::custom: return custom_(y);
    }
    return 0.0;
}

cplx levy_exponent_eval(const LevyExponent& e, double y) { return e(y); }

}  // namespace duality::kernels
