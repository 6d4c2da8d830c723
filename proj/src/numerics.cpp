#include "duality/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>

#include "duality/errors.hpp"
#include "duality/specfun.hpp"

namespace duality::numerics {

namespace {

constexpr double pi = std::numbers::pi;

GaussRule make_legendre(int n) {
    GaussRule r;
    r.nodes.resize(std::size_t(n));
    r.weights.resize(std::size_t(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 1;
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
        r.nodes[std::size_t(i)] = -z;
        r.nodes[std::size_t(n - 1 - i)] = z;
        r.weights[std::size_t(i)] = r.weights[std::size_t(n - 1 - i)] = 2.0 / ((1 - z * z) * dp * dp);
    }
    return r;
}

// log|L_n^{(a)}(x)| and sign, with rescaling so large n and x do not overflow.
// Also returns log|L_{n-1}| relative info via out params.
struct ScaledLaguerre {
    double cur, prev, log_scale;
};
ScaledLaguerre laguerre_scaled(int n, double a, double x) {
    double prev = 0.0, cur = 1.0, ls = 0.0;
    for (int k = 0; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        const double m = std::abs(cur);
        if (m > 1e100) {
            cur /= m;
            prev /= m;
            ls += std::log(m);
        }
    }
    return {cur, prev, ls};
}

LaguerreRule make_laguerre(int n, double alpha) {
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + alpha + 1.0;
    for (int i = 0; i + 1 < n; ++i) sub(i) = std::sqrt((i + 1.0) * (i + 1.0 + alpha));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    LaguerreRule r;
    r.nodes.resize(std::size_t(n));
    r.log_weights.resize(std::size_t(n));
    const double lconst = std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0) - 2.0 * std::log(n + 1.0);
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i);
        for (int it = 0; it < 6; ++it) {
            const auto s = laguerre_scaled(n, alpha, x);
            const double d = (n * s.cur - (n + alpha) * s.prev) / x;
            const double dx = s.cur / d;
            x -= dx;
            if (std::abs(dx) < 1e-15 * x) break;
        }
        const auto s1 = laguerre_scaled(n + 1, alpha, x);
        r.nodes[std::size_t(i)] = x;
        r.log_weights[std::size_t(i)] = lconst + std::log(x) - 2.0 * (std::log(std::abs(s1.cur)) + s1.log_scale);
    }
    return r;
}

// Gauss rule used inside the adaptive integrator.
constexpr int kAdaptiveOrder = 10;

struct Panel {
    double a, b, value, err, abs_value;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel eval_panel(const std::function<double(double)>& g, double a, double b) {
    const auto& r = gauss_legendre_rule(kAdaptiveOrder);
    auto rule = [&](double lo, double hi, double* absv) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        double s = 0, sa = 0;
        for (int i = 0; i < kAdaptiveOrder; ++i) {
            const double v = g(c + h * r.nodes[std::size_t(i)]) * r.weights[std::size_t(i)];
            s += v;
            sa += std::abs(v);
        }
        if (absv) *absv += sa * h;
        return s * h;
    };
    double absv = 0;
    const double whole = rule(a, b, nullptr);
    const double m = 0.5 * (a + b);
    const double halves = rule(a, m, &absv) + rule(m, b, &absv);
    double err = std::abs(halves - whole);
    if (!std::isfinite(halves)) throw DomainError("quad_integrate: integrand not finite");
    return {a, b, halves, err, absv};
}

// Adaptive bisection over the union of initial panels in a mapped variable.
QuadResult adaptive(const std::function<double(double)>& g, const std::vector<double>& breaks, double tol,
                    int max_panels) {
    std::priority_queue<Panel> heap;
    double total = 0, total_err = 0, total_abs = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        Panel p = eval_panel(g, breaks[i], breaks[i + 1]);
        total += p.value;
        total_err += p.err;
        total_abs += p.abs_value;
        heap.push(p);
    }
    int count = int(heap.size());
    auto floor_err = [&] { return 1e-15 * total_abs; };
    while (!heap.empty() && total_err > std::max(tol, floor_err()) && count < max_panels) {
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            heap.push(p);
            break;
        }
        Panel l = eval_panel(g, p.a, m), r = eval_panel(g, m, p.b);
        total += l.value + r.value - p.value;
        total_err += l.err + r.err - p.err;
        total_abs += l.abs_value + r.abs_value - p.abs_value;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // re-sum to shed accumulated cancellation
    total = 0;
    total_err = 0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_err += heap.top().err;
        heap.pop();
    }
    return {total, std::max(total_err, 0.0)};
}

// Exponential-map tail: x = c + dir*(e^u - 1), u in [0, U] with U chosen by probing.
double probe_tail(const std::function<double(double)>& g, double tol) {
    int quiet = 0;
    double peak = 0;
    for (double u = 0.5; u < 690.0; u += 0.5) {
        const double v = std::abs(g(u));
        peak = std::max(peak, v);
        if (v < 1e-4 * tol && v <= 1e-16 * peak + 1e-4 * tol) {
            if (++quiet >= 4) return u;
        } else {
            quiet = 0;
        }
    }
    return 690.0;
}

}  // namespace

const GaussRule& gauss_legendre_rule(int n) {
    if (n < 1) throw ParameterError("gauss_legendre_rule: n must be positive");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussRule>(make_legendre(n));
    return *slot;
}

const LaguerreRule& gauss_laguerre_rule(int n, double alpha) {
    if (n < 1 || n > 1000) throw ParameterError("gauss_laguerre_rule: n out of range");
    if (alpha < 0) throw ParameterError("gauss_laguerre_rule: alpha must be nonnegative");
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::unique_ptr<LaguerreRule>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{n, alpha}];
    if (!slot) slot = std::make_unique<LaguerreRule>(make_laguerre(n, alpha));
    return *slot;
}

QuadratureGrid::QuadratureGrid(std::vector<double> nodes, std::vector<double> weights, Domain domain)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), domain_(domain) {
    if (nodes_.size() != weights_.size() || nodes_.empty())
        throw ParameterError("QuadratureGrid: nodes and weights must be non-empty and equal length");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
            throw ParameterError("QuadratureGrid: weights must be nonnegative");
        if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
            throw ParameterError("QuadratureGrid: nodes must be strictly increasing");
    }
}

QuadratureGrid QuadratureGrid::gauss_legendre(int n, double a, double b) {
    return composite_gauss_legendre(a, b, 1, n);
}

QuadratureGrid QuadratureGrid::composite_gauss_legendre(double a, double b, int panels_, int order) {
    if (!(b > a) || panels_ < 1) throw ParameterError("composite_gauss_legendre: bad interval");
    std::vector<double> br(std::size_t(panels_) + 1);
    for (int i = 0; i <= panels_; ++i) br[std::size_t(i)] = a + (b - a) * i / panels_;
    return panels(br, order);
}

QuadratureGrid QuadratureGrid::panels(std::span<const double> breaks, int order) {
    if (breaks.size() < 2) throw ParameterError("panels: need at least two breakpoints");
    const auto& r = gauss_legendre_rule(order);
    std::vector<double> x, w;
    x.reserve((breaks.size() - 1) * std::size_t(order));
    w.reserve(x.capacity());
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double c = 0.5 * (breaks[p] + breaks[p + 1]), h = 0.5 * (breaks[p + 1] - breaks[p]);
        if (!(h > 0)) throw ParameterError("panels: breakpoints must increase");
        for (int i = 0; i < order; ++i) {
            x.push_back(c + h * r.nodes[std::size_t(i)]);
            w.push_back(h * r.weights[std::size_t(i)]);
        }
    }
    return QuadratureGrid(std::move(x), std::move(w), Domain{breaks.front(), breaks.back(), false, false});
}

QuadratureGrid QuadratureGrid::trapezoid(double a, double b, int intervals) {
    if (!(b > a) || intervals < 1) throw ParameterError("trapezoid: bad interval");
    const double h = (b - a) / intervals;
    std::vector<double> x(std::size_t(intervals) + 1), w(x.size(), h);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = a + h * double(i);
    w.front() = w.back() = 0.5 * h;
    return QuadratureGrid(std::move(x), std::move(w), Domain{a, b, false, false});
}

QuadratureGrid QuadratureGrid::integers(int kmax) {
    if (kmax < 0) throw ParameterError("integers: kmax must be nonnegative");
    std::vector<double> x(std::size_t(kmax) + 1), w(x.size(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = double(i);
    return QuadratureGrid(std::move(x), std::move(w), Domain{0, double(kmax), false, true});
}

QuadratureGrid QuadratureGrid::gauss_laguerre(int n, double alpha) {
    const auto& r = gauss_laguerre_rule(n, alpha);
    std::vector<double> w(r.nodes.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::exp(r.log_weights[i] + r.nodes[i] - alpha * std::log(r.nodes[i]));
    return QuadratureGrid(r.nodes, std::move(w), Domain{0, r.nodes.back(), false, true});
}

QuadratureGrid QuadratureGrid::with_domain(Domain d) const {
    QuadratureGrid g = *this;
    g.domain_ = d;
    return g;
}

double QuadratureGrid::integrate(const std::function<double(double)>& f) const {
    double s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += f(nodes_[i]) * weights_[i];
    return s;
}

QuadResult quad_integrate(const std::function<double(double)>& f, const Interval& dom, double target_tol,
                          int max_panels) {
    if (!(target_tol > 0)) throw ParameterError("quad_integrate: target_tol must be positive");
    if (!(dom.upper > dom.lower)) {
        if (dom.upper == dom.lower) return {0.0, 0.0};
        throw ParameterError("quad_integrate: empty interval");
    }
    const bool inf_lo = std::isinf(dom.lower), inf_hi = std::isinf(dom.upper);
    std::vector<double> bps;
    for (double b : dom.breakpoints)
        if (b > dom.lower && b < dom.upper) bps.push_back(b);
    std::sort(bps.begin(), bps.end());

    // finite core
    double core_lo = dom.lower, core_hi = dom.upper;
    if (inf_lo) core_lo = (bps.empty() ? (inf_hi ? 0.0 : dom.upper) : bps.front()) - 1.0;
    if (inf_hi) core_hi = (bps.empty() ? (inf_lo ? 0.0 : dom.lower) : bps.back()) + 1.0;
    if (inf_lo && inf_hi && core_hi - core_lo < 2.0) {
        core_lo -= 1.0;
        core_hi += 1.0;
    }
    const int pieces = int(inf_lo) + int(inf_hi) + 1;
    const double tol = target_tol / pieces;
    QuadResult out{0.0, 0.0};

    std::vector<double> breaks{core_lo};
    for (double b : bps)
        if (b > core_lo && b < core_hi) breaks.push_back(b);
    breaks.push_back(core_hi);
    {
        // subdivide long finite stretches so narrow features are not missed
        std::vector<double> refined{breaks.front()};
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            const int k = std::clamp(int(std::ceil((breaks[i + 1] - breaks[i]) / 1.0)), 1, 64);
            for (int j = 1; j <= k; ++j) refined.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * j / k);
        }
        breaks = std::move(refined);
    }
    const auto core = adaptive(f, breaks, tol, max_panels);
    out.value += core.value;
    out.achieved_tol += core.achieved_tol;

    auto tail = [&](double edge, double dir) {
        std::function<double(double)> g;
        double hi;
        std::vector<double> tb;
        if (dom.tail == TailKind::algebraic) {
            g = [&, edge, dir](double v) {
                const double t = std::tan(v);
                return f(edge + dir * t) * (1.0 + t * t);
            };
            hi = 0.5 * pi;
            for (int i = 0; i <= 16; ++i) tb.push_back(hi * i / 16);
        } else {
            g = [&, edge, dir](double u) {
                const double e = std::exp(u);
                return f(edge + dir * (e - 1.0)) * e;
            };
            hi = probe_tail(g, tol);
            const int k = std::max(4, int(std::ceil(hi * 2)));
            for (int i = 0; i <= k; ++i) tb.push_back(hi * i / k);
        }
        const auto r = adaptive(g, tb, tol, max_panels);
        out.value += r.value;
        out.achieved_tol += r.achieved_tol;
    };
    if (inf_hi) tail(core_hi, 1.0);
    if (inf_lo) tail(core_lo, -1.0);

    if (!(out.achieved_tol <= target_tol))
        throw AccuracyError("quad_integrate: tolerance not reached", out.achieved_tol, target_tol);
    return out;
}

KernelMatrix::KernelMatrix(QuadratureGrid source, QuadratureGrid target, RMatrix entries)
    : source_(std::move(source)), target_(std::move(target)), entries_(std::move(entries)) {
    if (entries_.rows() != Eigen::Index(source_.size()) || entries_.cols() != Eigen::Index(target_.size()))
        throw ParameterError("KernelMatrix: shape mismatch");
}

KernelMatrix KernelMatrix::compose(const KernelMatrix& next) const {
    if (target_.size() != next.source_.size()) throw ParameterError("KernelMatrix::compose: grid mismatch");
    return KernelMatrix(source_, next.target_, entries_ * next.entries_);
}

namespace {
double checked_entry(const Kernel2& kernel, double x, double y, double w) {
    const double v = kernel(x, y);
    if (!(v >= -1e-12)) {
        throw KernelError("kernel value " + std::to_string(v) + " at (" + std::to_string(x) + ", " +
                          std::to_string(y) + ")");
    }
    return std::max(v, 0.0) * w;
}
}  // namespace

KernelMatrix build_kernel_matrix_serial(const Kernel2& kernel, const QuadratureGrid& src, const QuadratureGrid& tgt) {
    RMatrix m(src.size(), tgt.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = 0; j < tgt.size(); ++j)
            m(Eigen::Index(i), Eigen::Index(j)) = checked_entry(kernel, src.node(i), tgt.node(j), tgt.weight(j));
    return KernelMatrix(src, tgt, std::move(m));
}

KernelMatrix build_kernel_matrix(const Kernel2& kernel, const QuadratureGrid& src, const QuadratureGrid& tgt) {
    RMatrix m(src.size(), tgt.size());
    const long rows = long(src.size());
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < rows; ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            for (std::size_t j = 0; j < tgt.size(); ++j)
                m(i, Eigen::Index(j)) = checked_entry(kernel, src.node(std::size_t(i)), tgt.node(j), tgt.weight(j));
        } catch (...) {
#pragma omp critical(duality_kernel_failure)
            if (!failure) failure = std::current_exception();
            failed = true;
        }
    }
    if (failure) std::rethrow_exception(failure);
    return KernelMatrix(src, tgt, std::move(m));
}

GridSampler::GridSampler(const QuadratureGrid& grid, std::span<const double> density) {
    const std::size_t n = grid.size();
    if (density.size() != n) throw ParameterError("GridSampler: density length mismatch");
    edges_.resize(n + 1);
    cdf_.assign(n + 1, 0.0);
    const auto& d = grid.domain();
    if (n == 1) {
        edges_[0] = grid.node(0) - 0.5 * grid.weight(0);
        edges_[1] = grid.node(0) + 0.5 * grid.weight(0);
    } else {
        for (std::size_t i = 1; i < n; ++i) edges_[i] = 0.5 * (grid.node(i - 1) + grid.node(i));
        edges_[0] = std::max(d.lower, grid.node(0) - 0.5 * (grid.node(1) - grid.node(0)));
        edges_[n] = std::min(d.upper, grid.node(n - 1) + 0.5 * (grid.node(n - 1) - grid.node(n - 2)));
        if (d.lower >= d.upper) {
            edges_[0] = grid.node(0) - 0.5 * (grid.node(1) - grid.node(0));
            edges_[n] = grid.node(n - 1) + 0.5 * (grid.node(n - 1) - grid.node(n - 2));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = density[i];
        if (!(v >= -1e-12)) throw DegenerateDensityError("GridSampler: negative density value");
        cdf_[i + 1] = cdf_[i] + std::max(v, 0.0) * grid.weight(i);
    }
    mass_ = cdf_[n];
    if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw DegenerateDensityError("GridSampler: total mass not positive");
    for (auto& c : cdf_) c /= mass_;
}

double GridSampler::sample(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("inverse_cdf_sample: u must lie in (0,1)");
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t k = std::size_t(it - cdf_.begin());
    k = std::clamp<std::size_t>(k, 1, cdf_.size() - 1);
    // skip empty cells
    const double c0 = cdf_[k - 1], c1 = cdf_[k];
    const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
    return edges_[k - 1] + frac * (edges_[k] - edges_[k - 1]);
}

double inverse_cdf_sample(const QuadratureGrid& grid, std::span<const double> density, double u) {
    return GridSampler(grid, density).sample(u);
}

}  // namespace duality::numerics
