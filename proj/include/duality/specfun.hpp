#pragma once

#include <complex>
#include <vector>

namespace duality::specfun {

struct GammaAbs2Args {
    double t;
    double y;
};

struct LaguerreParams {
    int k;
    double alpha;
    double x;
};

// log Γ(z) for Re z > 0.
std::complex<double> log_gamma(std::complex<double> z);

// |Γ((t+iy)/2)|² and its logarithm.
double gamma_abs2(double t, double y);
double gamma_abs2(const GammaAbs2Args& a);
double log_gamma_abs2(double t, double y);

// K_{iy}(z) for real y, z > 0. Even in y.
double bessel_k_imag(double y, double z);
// e^{z} K_{iy}(z), safe for large z.
double bessel_k_imag_scaled(double y, double z);

// e^{-x} I_nu(x) for nu >= 0, x >= 0.
double bessel_i_scaled(double nu, double x);

double laguerre_eval(const LaguerreParams& p);
double laguerre(int k, double alpha, double x);
// L_0 .. L_kmax at x.
std::vector<double> laguerre_sequence(int kmax, double alpha, double x);

// k!/(1+alpha)_k
double pochhammer_weight(int k, double alpha);
double log_pochhammer_weight(int k, double alpha);

// gamma(alpha+1) density x^alpha e^{-x} / Γ(alpha+1)
double gamma_density(double alpha, double x);

}  // namespace duality::specfun
