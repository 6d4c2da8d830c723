#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "duality/numerics.hpp"

namespace duality::kernels {

struct CIRParams {
    double alpha = 0.0;
};

struct DualHahnParams {
    double b = 1.0;
};

// Brownian motion killed at 0.
double killed_bm_kernel(double t, double x1, double x2);

double excursion_doob_h(double s, double x);
double log_excursion_doob_h(double s, double x);
double meander_doob_h(double s, double x);

// x1 = 0 with s1 = 0 selects the entrance law.
double excursion_kernel(double s1, double s2, double x1, double x2);
double meander_kernel(double s1, double s2, double x1, double x2);
double excursion_entrance_density(double s, double x);
double meander_entrance_density(double s, double x);

double cauchy_radial_kernel(double t, double y1, double y2);

double cir_kernel(double s, double x1, double x2, CIRParams p);
double cir_kernel_series(double s, double x1, double x2, CIRParams p, int terms = 200);
double cir_stationary_density(double x, CIRParams p);

double bd_kernel(double t, int k1, int k2, CIRParams p);
// Q(k1, k2) for k1 in [0, rows), k2 in [0, cols).
RMatrix bd_kernel_matrix(double t, int rows, int cols, CIRParams p);

// nu(dy) density (2/pi^2) y sinh(pi y) and its log.
double kl_nu_density(double y);
double log_kl_nu_density(double y);

// K_{iy}(e^x) on a (y, x) product grid, built once.
class BesselTable {
public:
    BesselTable(numerics::QuadratureGrid y_grid, numerics::QuadratureGrid x_grid);
    const numerics::QuadratureGrid& y_grid() const { return y_; }
    const numerics::QuadratureGrid& x_grid() const { return x_; }
    // rows: y nodes, cols: x nodes
    const RMatrix& values() const { return k_; }

private:
    numerics::QuadratureGrid y_;
    numerics::QuadratureGrid x_;
    RMatrix k_;
};

double yakubovich_kernel(double s, double x1, double x2);
// Kernel matrix on the table's x grid, entry(i,j) = p_s(x_i, x_j) w_j.
numerics::KernelMatrix yakubovich_matrix(double s, const BesselTable& table);

double dual_hahn_j(double t, double y, DualHahnParams p);
double dual_hahn_kernel(double t1, double t2, double y1, double y2, DualHahnParams p);

class LevyExponent {
public:
    enum class Kind { brownian, drifted_scaled_brownian, cauchy, poisson, compound_poisson_normal, custom };

    static LevyExponent brownian(double sigma2);
    static LevyExponent drifted_scaled_brownian(double lambda, double beta);
    static LevyExponent cauchy();
    static LevyExponent poisson();
    static LevyExponent compound_poisson_normal(double rate, double jump_sigma);
    static LevyExponent custom(std::string name, std::function<cplx(double)> phi);

    Kind kind() const { return kind_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }
    const std::string& name() const { return name_; }
    cplx operator()(double y) const;

private:
    LevyExponent(Kind k, double p1, double p2, std::string name) : kind_(k), p1_(p1), p2_(p2), name_(std::move(name)) {}
    Kind kind_;
    double p1_ = 0, p2_ = 0;
    std::string name_;
    std::function<cplx(double)> custom_;
};

cplx levy_exponent_eval(const LevyExponent& e, double y);

}  // namespace duality::kernels
