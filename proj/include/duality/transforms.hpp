#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "duality/kernels.hpp"
#include "duality/numerics.hpp"

namespace duality::transforms {

using numerics::QuadratureGrid;

// Dense quadrature operator from a source grid to a target grid.
class GridTransform {
public:
    GridTransform() = default;
    GridTransform(QuadratureGrid source, QuadratureGrid target, CMatrix matrix);
    CVector apply(const CVector& v) const;
    const CMatrix& matrix() const { return m_; }
    const QuadratureGrid& source() const { return src_; }
    const QuadratureGrid& target() const { return tgt_; }

private:
    QuadratureGrid src_;
    QuadratureGrid tgt_;
    CMatrix m_;
};

enum class Direction { forward, inverse };

// Throws TruncationError when the share of sum |f| w carried by the outer 5% of a
// truncated side exceeds tol. `weight` multiplies |f| when given.
void check_tail_mass(const QuadratureGrid& grid, const CVector& f, double tol,
                     const std::function<double(double)>& weight = {});

GridTransform fourier_sine_operator(const QuadratureGrid& x, const QuadratureGrid& y);
CVector fourier_sine(const CVector& f, const QuadratureGrid& x, const QuadratureGrid& y, double tail_tol = 1e-6);

GridTransform fourier_line_operator(const QuadratureGrid& x, const QuadratureGrid& y, Direction dir);
CVector fourier_line(const CVector& f, const QuadratureGrid& x, const QuadratureGrid& y, Direction dir,
                     double tail_tol = 1e-6);

// Laguerre coefficients k = 0..K from values on an x grid (dx weights).
constexpr int kMaxLaguerreDegree = 500;
GridTransform laguerre_forward_operator(const QuadratureGrid& x, double alpha, int K);
GridTransform laguerre_inverse_operator(const QuadratureGrid& x, double alpha, int K);
CVector laguerre_forward(const CVector& f, const QuadratureGrid& x, double alpha, int K);
CVector laguerre_inverse(const CVector& g, double alpha, const QuadratureGrid& x);

GridTransform kl_forward_operator(const kernels::BesselTable& table);
GridTransform kl_inverse_operator(const kernels::BesselTable& table);
CVector kl_forward(const CVector& f, const kernels::BesselTable& table, double tail_tol = 1e-6);
CVector kl_inverse(const CVector& g, const kernels::BesselTable& table, double tail_tol = 1e-6);

class TimePartition {
public:
    // Nondecreasing points of equal length; decreasing input is rejected.
    TimePartition(std::vector<double> s_points, std::vector<double> t_points);
    std::size_t n() const { return s_.size() - 1; }
    const std::vector<double>& s() const { return s_; }
    const std::vector<double>& t() const { return t_; }
    double ds(std::size_t k) const { return s_[k + 1] - s_[k]; }
    double dt(std::size_t k) const { return t_[k + 1] - t_[k]; }

private:
    std::vector<double> s_;
    std::vector<double> t_;
};

struct StateSpace {
    QuadratureGrid grid;
    std::function<double(double)> reference_density;  // mu or nu against the grid weights
    std::string label;
};

// (s1, s2) -> kernel matrix of the transition from time s1 to s2; builders may cache.
using TransitionBuilder = std::function<std::shared_ptr<const numerics::KernelMatrix>(double, double)>;

struct SpectralDualityPair {
    std::string name;
    StateSpace x_space;
    StateSpace y_space;
    GridTransform forward;  // x grid -> y grid
    GridTransform inverse;  // y grid -> x grid
    std::function<cplx(double)> phi;
    std::function<cplx(double)> psi;
    std::function<double(double, double)> h;  // h(s, x)
    std::function<double(double, double)> j;  // j(t, y)
    bool contraction_violated = false;
    double t_limit = std::numeric_limits<double>::infinity();
    // weight for the runtime tail-mass check of intermediate x functions
    std::function<double(double)> x_tail_weight;
    // kernel-route transition matrices P_{s1,s2} on the x grid and Q_{t1,t2} on the y grid
    TransitionBuilder x_transition;
    TransitionBuilder y_transition;
    // smallest increments the kernel matrices resolve on their grids; builders throw AccuracyError below
    double min_x_step = 0;
    double min_y_step = 0;
};

}  // namespace duality::transforms
