#include "duality/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "duality/errors.hpp"

namespace duality::specfun {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

constexpr double lanczos_g = 607.0 / 128.0;
constexpr std::array<double, 15> lanczos_c = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

cplx lanczos_lgamma(cplx z) {
    z -= 1.0;
    cplx x = lanczos_c[0];
    for (std::size_t i = 1; i < lanczos_c.size(); ++i) x += lanczos_c[i] / (z + double(i));
    const cplx t = z + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// Gauss-Legendre 24-point rule on [-1,1], computed once.
struct GL24 {
    std::array<double, 24> x{}, w{};
    GL24() {
        const int n = 24;
        for (int i = 0; i < n / 2; ++i) {
            double z = std::cos(pi * (i + 0.75) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = 0;
                for (int k = 1; k <= n; ++k) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
                }
                dp = n * (z * p0 - p1) / (z * z - 1);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * dp * dp);
        }
    }
};
const GL24& gl24() {
    static const GL24 rule;
    return rule;
}

// -pi Im(I_{iy}(z)) / sinh(pi y), power series. Good for small z or y >> z.
double bessel_k_series(double y, double z) {
    const double h = 0.5 * z;
    const double q = h * h;
    cplx term = std::exp(-log_gamma(cplx(1.0, y)));
    cplx sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * cplx(double(k), y));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    const cplx ii = std::exp(cplx(0.0, y * std::log(h))) * sum;
    return -pi * ii.imag() / std::sinh(pi * y);
}

// Scaled integral e^{z}K = int_0^{u*} exp(-z(cosh u - 1)) cos(yu) du, panels of given width.
double bessel_k_panels(double y, double z, double width, double* scale) {
    // integrand is at most 1 after scaling; e^{-41.5} is below double resolution of the result
    const double ustar = std::acosh(1.0 + 41.5 / z);
    const int panels = std::max(1, int(std::ceil(ustar / width)));
    const double hw = 0.5 * ustar / panels;
    const auto& r = gl24();
    double sum = 0, abs_sum = 0;
    for (int p = 0; p < panels; ++p) {
        const double c = (2 * p + 1) * hw;
        for (int i = 0; i < 24; ++i) {
            const double u = c + hw * r.x[i];
            const double sh = std::sinh(0.5 * u);
            const double e = std::exp(-2.0 * z * sh * sh) * r.w[i] * hw;
            sum += e * std::cos(y * u);
            abs_sum += e;
        }
    }
    if (scale) *scale = abs_sum;
    return sum;
}

double bessel_k_integral_scaled(double y, double z) {
    double width = std::min(0.5, 2.0 / std::sqrt(z));
    if (y > 0) width = std::min(width, 2.0 / y);
    double scale = 0;
    double coarse = bessel_k_panels(y, z, width, &scale);
    for (int level = 0; level < 6; ++level) {
        width *= 0.5;
        const double fine = bessel_k_panels(y, z, width, nullptr);
        const double err = std::abs(fine - coarse);
        if (err <= 1e-13 * scale) return fine;
        coarse = fine;
    }
    throw AccuracyError("bessel_k_imag: panel refinement did not converge", std::abs(coarse), 1e-13);
}

bool use_series(double y, double z) { return y >= 1e-4 && (z <= 2.0 || y > 1.3 * z); }

double i_scaled_asymptotic(double nu, double x) {
    // e^{-x} I_nu(x) asymptotic series for large x.
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * pi * x);
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
    if (!(z.real() > 0.0)) throw DomainError("log_gamma: requires Re z > 0");
    cplx shift = 0.0;
    while (z.real() < 1.0) {
        shift += std::log(z);
        z += 1.0;
    }
    return lanczos_lgamma(z) - shift;
}

double log_gamma_abs2(double t, double y) {
    if (!(t > 0.0) || !std::isfinite(y)) throw DomainError("gamma_abs2: requires t > 0");
    return 2.0 * log_gamma(cplx(0.5 * t, 0.5 * std::abs(y))).real();
}

double gamma_abs2(double t, double y) { return std::exp(log_gamma_abs2(t, y)); }
double gamma_abs2(const GammaAbs2Args& a) { return gamma_abs2(a.t, a.y); }

double bessel_k_imag_scaled(double y, double z) {
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("bessel_k_imag: requires z > 0");
    y = std::abs(y);
    if (y == 0.0 && z <= 2.0) return std::exp(z) * std::cyl_bessel_k(0.0, z);
    if (use_series(y, z)) return std::exp(z) * bessel_k_series(y, z);
    return bessel_k_integral_scaled(y, z);
}

double bessel_k_imag(double y, double z) {
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("bessel_k_imag: requires z > 0");
    y = std::abs(y);
    if (y == 0.0 && z <= 2.0) return std::cyl_bessel_k(0.0, z);
    if (use_series(y, z)) return bessel_k_series(y, z);
    if (z > 700.0) return 0.0;
    return std::exp(-z) * bessel_k_integral_scaled(y, z);
}

double bessel_i_scaled(double nu, double x) {
    if (nu < 0.0 || x < 0.0) throw DomainError("bessel_i_scaled: requires nu, x >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (x > 500.0 && x > 2.0 * nu * nu) return i_scaled_asymptotic(nu, x);
    return std::cyl_bessel_i(nu, x) * std::exp(-x);
}

double laguerre(int k, double alpha, double x) {
    if (k < 0) throw DomainError("laguerre: negative degree");
    double prev = 0.0, cur = 1.0;
    for (int n = 0; n < k; ++n) {
        const double next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double laguerre_eval(const LaguerreParams& p) { return laguerre(p.k, p.alpha, p.x); }

std::vector<double> laguerre_sequence(int kmax, double alpha, double x) {
    std::vector<double> out(std::size_t(kmax) + 1);
    double prev = 0.0, cur = 1.0;
    out[0] = 1.0;
    for (int n = 0; n < kmax; ++n) {
        const double next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
        out[std::size_t(n) + 1] = cur;
    }
    return out;
}

double log_pochhammer_weight(int k, double alpha) {
    if (k < 0) throw DomainError("pochhammer_weight: negative k");
    return std::lgamma(k + 1.0) + std::lgamma(alpha + 1.0) - std::lgamma(alpha + 1.0 + k);
}

double pochhammer_weight(int k, double alpha) {
    if (alpha == 0.0) return 1.0;
    return std::exp(log_pochhammer_weight(k, alpha));
}

double gamma_density(double alpha, double x) {
    if (x <= 0.0) return (x == 0.0 && alpha == 0.0) ? 1.0 : 0.0;
    return std::exp(alpha * std::log(x) - x - std::lgamma(alpha + 1.0));
}

}  // namespace duality::specfun
