#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace duality {

using cplx = std::complex<double>;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

}  // namespace duality

namespace duality::numerics {

struct Domain {
    double lower = 0.0;
    double upper = 0.0;
    // true where the natural state space extends past the grid
    bool truncated_lower = false;
    bool truncated_upper = false;
};

class QuadratureGrid {
public:
    QuadratureGrid() = default;
    QuadratureGrid(std::vector<double> nodes, std::vector<double> weights, Domain domain);

    static QuadratureGrid gauss_legendre(int n, double a, double b);
    // equal panels of `order` Gauss-Legendre nodes each
    static QuadratureGrid composite_gauss_legendre(double a, double b, int panels, int order);
    // explicit panel breakpoints
    static QuadratureGrid panels(std::span<const double> breaks, int order);
    static QuadratureGrid trapezoid(double a, double b, int intervals);
    // counting measure on {0, .., kmax}
    static QuadratureGrid integers(int kmax);
    // generalized Gauss-Laguerre nodes, weights converted to dx (weight function removed)
    static QuadratureGrid gauss_laguerre(int n, double alpha);

    std::size_t size() const { return nodes_.size(); }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    const Domain& domain() const { return domain_; }
    QuadratureGrid with_domain(Domain d) const;

    double integrate(const std::function<double(double)>& f) const;

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
    Domain domain_;
};

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};
const GaussRule& gauss_legendre_rule(int n);

struct LaguerreRule {
    std::vector<double> nodes;
    std::vector<double> log_weights;  // for weight x^alpha e^{-x}
};
const LaguerreRule& gauss_laguerre_rule(int n, double alpha);

enum class TailKind { exponential, algebraic };

struct Interval {
    double lower;
    double upper;  // may be +inf; lower may be -inf
    TailKind tail = TailKind::exponential;
    std::vector<double> breakpoints = {};
};

struct QuadResult {
    double value;
    double achieved_tol;
};

QuadResult quad_integrate(const std::function<double(double)>& f, const Interval& domain, double target_tol,
                          int max_panels = 4000);

class KernelMatrix {
public:
    KernelMatrix(QuadratureGrid source, QuadratureGrid target, RMatrix entries);

    const QuadratureGrid& source_grid() const { return source_; }
    const QuadratureGrid& target_grid() const { return target_; }
    const RMatrix& entries() const { return entries_; }
    RVector row_sums() const { return entries_.rowwise().sum(); }
    CVector apply(const CVector& v) const { return entries_.cast<cplx>() * v; }
    RVector apply(const RVector& v) const { return entries_ * v; }
    KernelMatrix compose(const KernelMatrix& next) const;

private:
    QuadratureGrid source_;
    QuadratureGrid target_;
    RMatrix entries_;
};

using Kernel2 = std::function<double(double, double)>;

// entry(i,j) = kernel(src_i, tgt_j) * w_j. OpenMP over rows.
KernelMatrix build_kernel_matrix(const Kernel2& kernel, const QuadratureGrid& src, const QuadratureGrid& tgt);
// Same result, single thread. Reference for tests and benchmarks.
KernelMatrix build_kernel_matrix_serial(const Kernel2& kernel, const QuadratureGrid& src, const QuadratureGrid& tgt);

// Piecewise-linear CDF over cells bounded by node midpoints.
class GridSampler {
public:
    GridSampler(const QuadratureGrid& grid, std::span<const double> density);
    double sample(double u) const;
    double total_mass() const { return mass_; }

private:
    std::vector<double> edges_;  // cell boundaries, size n+1
    std::vector<double> cdf_;    // cumulative mass at edges, normalized
    double mass_ = 0;
};

double inverse_cdf_sample(const QuadratureGrid& grid, std::span<const double> density, double u);

}  // namespace duality::numerics
