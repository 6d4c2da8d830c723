#pragma once

#include "duality/kernels.hpp"
#include "duality/transforms.hpp"

namespace duality::pairs {

using transforms::SpectralDualityPair;

struct GridOptions {
    int order = 8;       // Gauss-Legendre nodes per panel
    double x_max = 0.0;  // upper end of the x grid; 0 keeps the pair's default
};

// Excursion (h_s) and meander (h~_s) against the radial Cauchy process; sine transform, j_t(y) = y.
SpectralDualityPair excursion_pair(const GridOptions& opt = {});
SpectralDualityPair meander_pair(const GridOptions& opt = {});

// CIR diffusion against the birth-death chain on 0..kmax; Laguerre expansion.
SpectralDualityPair cir_pair(kernels::CIRParams p, int kmax = 80, const GridOptions& opt = {});

// X with exponent phi (Brownian or Cauchy for the kernel route), Y with exponent psi
// (Brownian or Poisson for the kernel route); Fourier transform on the line.
SpectralDualityPair levy_pair(const kernels::LevyExponent& x_exponent, const kernels::LevyExponent& y_exponent,
                              const GridOptions& opt = {});

// Killed Brownian motion against the dual Hahn process; Kontorovich-Lebedev transform.
SpectralDualityPair kl_pair(kernels::DualHahnParams p, const GridOptions& opt = {});

// Graded panel grid on (0, x_max) used by the CIR pair.
numerics::QuadratureGrid cir_x_grid(int order, double x_max = 60.0);

}  // namespace duality::pairs
