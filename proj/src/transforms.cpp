#include "duality/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "duality/errors.hpp"
#include "duality/specfun.hpp"

namespace duality::transforms {

namespace {

constexpr double pi = std::numbers::pi;

bool is_uniform(const QuadratureGrid& g, double* h) {
    if (g.size() < 3) return false;
    const double step = g.node(1) - g.node(0);
    for (std::size_t i = 2; i < g.size(); ++i)
        if (std::abs(g.node(i) - g.node(i - 1) - step) > 1e-12 * std::max(1.0, std::abs(g.node(i)))) return false;
    *h = step;
    return true;
}

// For each target t: (sum_k c_k cos(t x_k), sum_k c_k sin(t x_k)) with complex c.
// Uniform source grids use a rotation recurrence, resynchronized every 512 steps.
struct PhaseSums {
    CVector cos_part, sin_part;
};

PhaseSums phase_sums(const CVector& c, const QuadratureGrid& src, const QuadratureGrid& tgt) {
    const std::size_t ns = src.size();
    std::vector<double> cr(ns), ci(ns);
    for (std::size_t k = 0; k < ns; ++k) {
        cr[k] = c(Eigen::Index(k)).real();
        ci[k] = c(Eigen::Index(k)).imag();
    }
    PhaseSums out{CVector(Eigen::Index(tgt.size())), CVector(Eigen::Index(tgt.size()))};
    double h = 0;
    const bool uniform = is_uniform(src, &h);
    const bool complex_input = std::any_of(ci.begin(), ci.end(), [](double v) { return v != 0.0; });
    const long nt = long(tgt.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nt; ++i) {
        const double t = tgt.node(std::size_t(i));
        double rc = 0, rs = 0, ic = 0, is = 0;
        if (uniform) {
            // four interleaved rotation chains keep the loop from being latency bound
            constexpr int L = 4;
            const double rr = std::cos(L * t * h), ri = std::sin(L * t * h);
            for (std::size_t k0 = 0; k0 < ns; k0 += 512) {
                double er[L], ei[L], arc[L] = {}, ars[L] = {}, aic[L] = {}, ais[L] = {};
                for (int j = 0; j < L; ++j) {
                    er[j] = std::cos(t * (src.node(k0) + j * h));
                    ei[j] = std::sin(t * (src.node(k0) + j * h));
                }
                const std::size_t k1 = std::min(ns, k0 + 512);
                std::size_t k = k0;
                for (; k + L <= k1; k += L) {
                    for (int j = 0; j < L; ++j) {
                        arc[j] += cr[k + j] * er[j];
                        ars[j] += cr[k + j] * ei[j];
                        if (complex_input) {
                            aic[j] += ci[k + j] * er[j];
                            ais[j] += ci[k + j] * ei[j];
                        }
                        const double nr = er[j] * rr - ei[j] * ri;
                        ei[j] = er[j] * ri + ei[j] * rr;
                        er[j] = nr;
                    }
                }
                for (int j = 0; k < k1; ++k, ++j) {
                    arc[j] += cr[k] * er[j];
                    ars[j] += cr[k] * ei[j];
                    aic[j] += ci[k] * er[j];
                    ais[j] += ci[k] * ei[j];
                }
                for (int j = 0; j < L; ++j) {
                    rc += arc[j];
                    rs += ars[j];
                    ic += aic[j];
                    is += ais[j];
                }
            }
        } else {
            for (std::size_t k = 0; k < ns; ++k) {
                const double a = t * src.node(k), co = std::cos(a), si = std::sin(a);
                rc += cr[k] * co;
                rs += cr[k] * si;
                ic += ci[k] * co;
                is += ci[k] * si;
            }
        }
        out.cos_part(i) = cplx(rc, ic);
        out.sin_part(i) = cplx(rs, is);
    }
    return out;
}

CVector weighted(const CVector& f, const QuadratureGrid& g) {
    if (f.size() != Eigen::Index(g.size())) throw ParameterError("transform: function length does not match grid");
    CVector c = f;
    for (std::size_t k = 0; k < g.size(); ++k) c(Eigen::Index(k)) *= g.weight(k);
    return c;
}

}  // namespace

GridTransform::GridTransform(QuadratureGrid source, QuadratureGrid target, CMatrix matrix)
    : src_(std::move(source)), tgt_(std::move(target)), m_(std::move(matrix)) {
    if (m_.rows() != Eigen::Index(tgt_.size()) || m_.cols() != Eigen::Index(src_.size()))
        throw ParameterError("GridTransform: shape mismatch");
}

CVector GridTransform::apply(const CVector& v) const {
    if (v.size() != m_.cols()) throw ParameterError("GridTransform::apply: length mismatch");
    return m_ * v;
}

void check_tail_mass(const QuadratureGrid& grid, const CVector& f, double tol,
                     const std::function<double(double)>& weight) {
    const auto& d = grid.domain();
    if (!d.truncated_lower && !d.truncated_upper) return;
    const double lo = grid.node(0), hi = grid.node(grid.size() - 1);
    const double band = 0.05 * (hi - lo);
    double total = 0, tail = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i);
        double m = std::abs(f(Eigen::Index(i))) * grid.weight(i);
        if (weight) m *= weight(x);
        total += m;
        if ((d.truncated_upper && x > hi - band) || (d.truncated_lower && x < lo + band)) tail += m;
    }
    if (total > 0 && tail > tol * total)
        throw TruncationError("tail mass " + std::to_string(tail / total) + " exceeds tolerance " + std::to_string(tol));
}

GridTransform fourier_sine_operator(const QuadratureGrid& x, const QuadratureGrid& y) {
    const double c = std::sqrt(2.0 / pi);
    CMatrix m(Eigen::Index(y.size()), Eigen::Index(x.size()));
    const long ny = long(y.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < ny; ++i)
        for (std::size_t k = 0; k < x.size(); ++k)
            m(i, Eigen::Index(k)) = c * std::sin(y.node(std::size_t(i)) * x.node(k)) * x.weight(k);
    return GridTransform(x, y, std::move(m));
}

CVector fourier_sine(const CVector& f, const QuadratureGrid& x, const QuadratureGrid& y, double tail_tol) {
    check_tail_mass(x, f, tail_tol);
    const CVector c = weighted(f, x);
    return std::sqrt(2.0 / pi) * phase_sums(c, x, y).sin_part;
}

GridTransform fourier_line_operator(const QuadratureGrid& x, const QuadratureGrid& y, Direction dir) {
    const double sign = dir == Direction::forward ? -1.0 : 1.0;
    const double c = 1.0 / std::sqrt(2.0 * pi);
    CMatrix m(Eigen::Index(y.size()), Eigen::Index(x.size()));
    const long ny = long(y.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < ny; ++i)
        for (std::size_t k = 0; k < x.size(); ++k)
            m(i, Eigen::Index(k)) = c * std::polar(x.weight(k), sign * y.node(std::size_t(i)) * x.node(k));
    return GridTransform(x, y, std::move(m));
}

CVector fourier_line(const CVector& f, const QuadratureGrid& x, const QuadratureGrid& y, Direction dir,
                     double tail_tol) {
    check_tail_mass(x, f, tail_tol);
    const CVector c = weighted(f, x);
    const auto p = phase_sums(c, x, y);
    const cplx i(0, dir == Direction::forward ? -1.0 : 1.0);
    return (p.cos_part + i * p.sin_part) / std::sqrt(2.0 * pi);
}

GridTransform laguerre_forward_operator(const QuadratureGrid& x, double alpha, int K) {
    if (K < 0 || K > kMaxLaguerreDegree) throw ParameterError("laguerre_forward: K outside [0, 500]");
    if (alpha < 0) throw ParameterError("laguerre_forward: alpha must be nonnegative");
    CMatrix m(K + 1, Eigen::Index(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto l = specfun::laguerre_sequence(K, alpha, x.node(j));
        const double w = specfun::gamma_density(alpha, x.node(j)) * x.weight(j);
        for (int k = 0; k <= K; ++k) m(k, Eigen::Index(j)) = l[std::size_t(k)] * w;
    }
    return GridTransform(x, QuadratureGrid::integers(K), std::move(m));
}

GridTransform laguerre_inverse_operator(const QuadratureGrid& x, double alpha, int K) {
    if (K < 0 || K > kMaxLaguerreDegree) throw ParameterError("laguerre_inverse: K outside [0, 500]");
    CMatrix m(Eigen::Index(x.size()), K + 1);
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto l = specfun::laguerre_sequence(K, alpha, x.node(j));
        for (int k = 0; k <= K; ++k) m(Eigen::Index(j), k) = l[std::size_t(k)] * specfun::pochhammer_weight(k, alpha);
    }
    return GridTransform(QuadratureGrid::integers(K), x, std::move(m));
}

CVector laguerre_forward(const CVector& f, const QuadratureGrid& x, double alpha, int K) {
    return laguerre_forward_operator(x, alpha, K).apply(f);
}

CVector laguerre_inverse(const CVector& g, double alpha, const QuadratureGrid& x) {
    if (g.size() == 0) throw ParameterError("laguerre_inverse: empty coefficient sequence");
    return laguerre_inverse_operator(x, alpha, int(g.size()) - 1).apply(g);
}

GridTransform kl_forward_operator(const kernels::BesselTable& table) {
    const auto& xg = table.x_grid();
    CMatrix m = table.values().cast<cplx>();
    for (std::size_t j = 0; j < xg.size(); ++j) m.col(Eigen::Index(j)) *= xg.weight(j);
    return GridTransform(xg, table.y_grid(), std::move(m));
}

GridTransform kl_inverse_operator(const kernels::BesselTable& table) {
    const auto& yg = table.y_grid();
    CMatrix m = table.values().transpose().cast<cplx>();
    for (std::size_t i = 0; i < yg.size(); ++i) m.col(Eigen::Index(i)) *= kernels::kl_nu_density(yg.node(i)) * yg.weight(i);
    return GridTransform(yg, table.x_grid(), std::move(m));
}

namespace {
double k0_exp(double x) { return x > 6.5 ? 0.0 : specfun::bessel_k_imag(0.0, std::exp(x)); }
}  // namespace

CVector kl_forward(const CVector& f, const kernels::BesselTable& table, double tail_tol) {
    const auto& xg = table.x_grid();
    if (f.size() != Eigen::Index(xg.size())) throw ParameterError("kl_forward: length mismatch");
    check_tail_mass(xg.with_domain({xg.domain().lower, xg.domain().upper, true, true}), f, tail_tol, k0_exp);
    return kl_forward_operator(table).apply(f);
}

CVector kl_inverse(const CVector& g, const kernels::BesselTable& table, double tail_tol) {
    const auto& yg = table.y_grid();
    if (g.size() != Eigen::Index(yg.size())) throw ParameterError("kl_inverse: length mismatch");
    // sup_x |K_{iy}(e^x)| nu(y) grows like sqrt(nu(y)), so that is the weight that matters for the sum
    check_tail_mass(yg.with_domain({yg.domain().lower, yg.domain().upper, false, true}), g, tail_tol,
                    [](double y) { return std::sqrt(kernels::kl_nu_density(y)); });
    return kl_inverse_operator(table).apply(g);
}

TimePartition::TimePartition(std::vector<double> s_points, std::vector<double> t_points)
    : s_(std::move(s_points)), t_(std::move(t_points)) {
    if (s_.empty() || s_.size() != t_.size()) throw ParameterError("TimePartition: s and t must have equal nonzero length");
    for (std::size_t k = 0; k + 1 < s_.size(); ++k) {
        if (!(s_[k + 1] >= s_[k])) throw ParameterError("TimePartition: s points must be nondecreasing");
        if (!(t_[k + 1] >= t_[k])) throw ParameterError("TimePartition: t points must be nondecreasing");
    }
    for (double v : s_)
        if (!std::isfinite(v)) throw ParameterError("TimePartition: non-finite time");
    for (double v : t_)
        if (!std::isfinite(v)) throw ParameterError("TimePartition: non-finite time");
}

}  // namespace duality::transforms
