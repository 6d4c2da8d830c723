#include "duality/cases.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "duality/engine.hpp"
#include "duality/errors.hpp"
#include "duality/kernels.hpp"
#include "duality/montecarlo.hpp"
#include "duality/pairs.hpp"
#include "duality/simulate.hpp"
#include "duality/specfun.hpp"

namespace duality::engine {

std::string_view to_string(Method m) { return m == Method::monte_carlo ? "monte-carlo" : "chain-quadrature"; }

namespace {

using numerics::quad_integrate;
using numerics::QuadratureGrid;
using simulate::MeanderMethod;
using transforms::TimePartition;

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// Allowance for the fixed product grids of the chain-quadrature routes, on top of Monte Carlo error.
constexpr double kChainAllowance = 1e-6;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s + ")";
}

double scaled(const CaseContext& ctx, double budget) { return budget * ctx.overrides.tolerance_scale; }

PointReport make_point(std::string label, SideResult lhs, SideResult rhs, double budget) {
    PointReport p;
    p.label = std::move(label);
    p.lhs = lhs;
    p.rhs = rhs;
    p.residual = std::abs(lhs.value - rhs.value);
    p.budget = budget;
    p.passed = p.residual <= budget;
    return p;
}

SideResult mc(const CaseContext& ctx, std::string_view estimator, std::size_t point,
              const std::function<cplx(RngStream&)>& draw) {
    const auto base = stream_hash(ctx.case_id + "/" + std::string(estimator) + "/" + std::to_string(point));
    const auto e = monte_carlo(ctx.seed, base, ctx.mc_paths, draw);
    return {e.mean, e.se};
}

pairs::GridOptions grid_options(const CaseContext& ctx) {
    pairs::GridOptions g;
    if (ctx.overrides.grid_nodes) g.order = *ctx.overrides.grid_nodes;
    if (ctx.overrides.x_max) g.x_max = *ctx.overrides.x_max;
    return g;
}

std::vector<double> uniform_times(double horizon, double step) {
    const int m = std::max(1, int(std::ceil(horizon / step - 1e-9)));
    std::vector<double> t(std::size_t(m) + 0);
    for (int k = 1; k <= m; ++k) t[std::size_t(k - 1)] = horizon * k / m;
    return t;
}

// Trapezoid integral of fn(X_u) over [0, horizon] along a path started at 0 on uniform_times.
template <class Fn>
auto trapezoid(const simulate::PathSample& path, double horizon, Fn fn) {
    const double h = horizon / double(path.values.size());
    auto acc = 0.5 * fn(0.0);
    for (std::size_t k = 0; k + 1 < path.values.size(); ++k) acc += fn(path.values[k]);
    acc += 0.5 * fn(path.values.back());
    return acc * h;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool increasing(const std::vector<double>& v, double lower, double upper, bool strict_upper) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > lower) || v[i] > upper || (strict_upper && v[i] >= upper)) return false;
        if (i > 0 && !(v[i] > v[i - 1])) return false;
    }
    return !v.empty();
}

bool has_partition(const CaseContext& ctx) { return ctx.overrides.s_points || ctx.overrides.t_points; }

std::pair<std::vector<double>, std::vector<double>> partition_override(const CaseContext& ctx) {
    require(ctx.overrides.s_points && ctx.overrides.t_points,
            ctx.case_id + ": s_points and t_points must be given together");
    return {*ctx.overrides.s_points, *ctx.overrides.t_points};
}

CVector on_grid(const QuadratureGrid& g, const std::function<cplx(double)>& fn) {
    CVector v(Eigen::Index(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) v(Eigen::Index(i)) = fn(g.node(i));
    return v;
}

cplx integrate(const QuadratureGrid& g, const CVector& v, const std::function<double(double)>& weight) {
    cplx acc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += v(Eigen::Index(i)) * weight(g.node(i)) * g.weight(i);
    return acc;
}

const ChainOptions kKernelRoute{Route::kernel};

// ---------------------------------------------------------------- excursion and meander

std::vector<PointReport> spl_n1(const CaseContext& ctx) {
    std::vector<std::array<double, 2>> pts{{0.5, 1.0}, {0.3, 0.5}, {0.7, 2.0}};
    if (has_partition(ctx)) {
        const auto [s, t] = partition_override(ctx);
        require(s.size() == 1 && t.size() == 1 && increasing(s, 0, 1, true) && t[0] > 0,
                "spl-n1: expects s_points=[s1] in (0,1) and t_points=[t1] > 0");
        pts = {{s[0], t[0]}};
    }
    std::vector<PointReport> out;
    for (auto [s, t] : pts) {
        const auto lhs = quad_integrate(
            [&](double x) { return std::exp(-t * x) * kernels::excursion_entrance_density(s, x); }, {0, inf}, 1e-12);
        double inner_err = 0;
        auto inner = [&](double y) {
            const auto r = quad_integrate(
                [&](double z) { return kernels::cauchy_radial_kernel(t, y, z) * std::exp(-0.5 * (1 - s) * z * z); },
                {0, inf, numerics::TailKind::exponential, {y}}, 1e-12);
            inner_err = std::max(inner_err, r.achieved_tol);
            return r.value;
        };
        const auto rhs = quad_integrate([&](double y) { return y * y * std::exp(-0.5 * s * y * y) * inner(y); },
                                        {0, inf}, 1e-10);
        const double c = std::sqrt(2 / pi);
        out.push_back(make_point("s=" + fmt(s) + " t=" + fmt(t), {lhs.value, lhs.achieved_tol},
                                 {c * rhs.value, c * (rhs.achieved_tol + inner_err)}, scaled(ctx, 1e-4)));
    }
    return out;
}

// right side of the excursion identity with f = 1: G chain of the excursion pair against 2y e^{-s0 y^2/2}
cplx excursion_laplace_rhs(const CaseContext& ctx, const std::vector<double>& st, const std::vector<double>& t) {
    const auto pair = pairs::excursion_pair(grid_options(ctx));
    std::vector<double> s = st;
    s.push_back(0.5 * (st.back() + 1.0));  // any s_n in (s~_n, 1): its factors cancel
    std::vector<double> tt{0.0};
    tt.insert(tt.end(), t.begin(), t.end());
    const TimePartition part(s, tt);
    const double sn = s.back();
    const auto& y = pair.y_space.grid;
    const CVector g = on_grid(y, [&](double v) { return std::exp(-0.5 * (1 - sn) * v * v) / std::sqrt(2 * pi); });
    const CVector jg = evaluate_G_chain(pair, part, g, kKernelRoute);
    const double s0 = s.front();
    return integrate(y, jg, [&](double v) { return 2 * v * std::exp(-0.5 * s0 * v * v); });
}

std::vector<PointReport> spl_n2(const CaseContext& ctx) {
    using P = std::pair<std::vector<double>, std::vector<double>>;
    std::vector<P> pts{{{0.3, 0.7}, {0.5, 1.2}}, {{0.5, 0.8}, {1.0, 1.5}}};
    if (has_partition(ctx)) {
        auto [s, t] = partition_override(ctx);
        require(s.size() == t.size() && increasing(s, 0, 1, true) && increasing(t, 0, inf, false),
                "spl-n2: expects increasing s_points in (0,1) and increasing t_points > 0 of equal length");
        pts = {{s, t}};
    }
    std::vector<PointReport> out;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto& [s, t] = pts[p];
        const auto lhs = mc(ctx, "vervaat", p, [&, step = ctx.step](RngStream& rng) {
            const auto path = simulate::sample_excursion(rng, s, step);
            double e = 0, prev = 0;
            for (std::size_t k = 0; k < s.size(); ++k) {
                e += (t[k] - prev) * path.values[k];
                prev = t[k];
            }
            return cplx(std::exp(-e));
        });
        const cplx rhs = excursion_laplace_rhs(ctx, s, t);
        out.push_back(make_point("s~=" + fmt_list(s) + " t=" + fmt_list(t), lhs, {rhs, kChainAllowance},
                                 scaled(ctx, 3 * lhs.error + kChainAllowance)));
    }
    return out;
}

struct PropPoint {
    std::vector<double> s;
    std::vector<double> t;
    double c;  // f(x) = exp(-c x^2 / 2)
};

std::vector<PropPoint> prop_points(const CaseContext& ctx) {
    std::vector<PropPoint> pts{{{0.2, 0.5, 0.8}, {0.0, 0.7, 1.5}, 1.0}, {{0.4, 0.7}, {0.0, 1.0}, 0.5}};
    if (has_partition(ctx)) {
        auto [s, t] = partition_override(ctx);
        require(s.size() == t.size() && s.size() >= 2 && increasing(s, 0, 1, true) && t.front() == 0.0 &&
                    increasing({t.begin() + 1, t.end()}, 0, inf, false),
                ctx.case_id + ": expects s_points 0<s0<..<sn<1 and t_points 0=t0<..<tn");
        pts = {{s, t, 1.0}};
    }
    return pts;
}

std::vector<PointReport> prop_case(const CaseContext& ctx, bool meander) {
    const auto pair = meander ? pairs::meander_pair(grid_options(ctx)) : pairs::excursion_pair(grid_options(ctx));
    const auto& x = pair.x_space.grid;
    const auto& y = pair.y_space.grid;
    std::vector<PointReport> out;
    for (const auto& pt : prop_points(ctx)) {
        const TimePartition part(pt.s, pt.t);
        const double s0 = pt.s.front(), sn = pt.s.back(), c = pt.c;
        const CVector f = on_grid(x, [&](double v) { return std::exp(-0.5 * c * v * v); });

        // terminal g from the coupling y g = F(h_{sn} f), computed independently of the grid transform
        CVector g(Eigen::Index(y.size()));
        if (!meander) {
            const double a = 1 / (1 - sn) + c, norm = std::pow(a, 1.5) * std::sqrt(2 * pi * std::pow(1 - sn, 3));
            g = on_grid(y, [&](double v) { return std::exp(-v * v / (2 * a)) / norm; });
        } else {
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double yi = y.node(i);
                const auto r = quad_integrate(
                    [&](double u) { return kernels::meander_doob_h(sn, u) * std::exp(-0.5 * c * u * u) * std::sin(u * yi); },
                    {0, inf}, 1e-13);
                g(Eigen::Index(i)) = std::sqrt(2 / pi) * r.value / yi;
            }
        }
        const CVector spectral = coupled_g(pair, part, f);
        double coupling = 0;
        for (std::size_t i = 0; i < y.size(); ++i)
            coupling = std::max(coupling, y.node(i) * std::abs(g(Eigen::Index(i)) - spectral(Eigen::Index(i))));
        if (coupling > 1e-6)
            throw CaseDefinitionError(ctx.case_id + ": coupling y g = F(h f) violated by " + fmt(coupling));

        const CVector hf = evaluate_F_chain(pair, part, f, kKernelRoute);
        const cplx lhs = integrate(x, hf, [&](double v) { return std::sqrt(8 * pi) * kernels::excursion_doob_h(1 - s0, v); });
        const CVector jg = evaluate_G_chain(pair, part, g, kKernelRoute);
        const cplx rhs = integrate(y, jg, [&](double v) { return 2 * v * std::exp(-0.5 * s0 * v * v); });
        out.push_back(make_point("s=" + fmt_list(pt.s) + " t=" + fmt_list(pt.t) + " c=" + fmt(c),
                                 {lhs, kChainAllowance}, {rhs, kChainAllowance}, scaled(ctx, 1e-5)));
    }
    return out;
}

struct MeanderPoint {
    std::vector<double> s;  // s~_1 < .. < s~_n in (0,1)
    std::vector<double> c;  // Laplace coefficients
};

std::vector<MeanderPoint> meander_points(const CaseContext& ctx, std::vector<MeanderPoint> defaults, bool endpoint) {
    if (!has_partition(ctx)) return defaults;
    auto [s, t] = partition_override(ctx);
    const std::size_t nt = s.size() + (endpoint ? 1 : 0);
    const bool ok_t = t.size() == nt && t.front() > 0 &&
                      std::is_sorted(t.begin(), t.end()) &&
                      increasing({t.begin(), t.begin() + std::ptrdiff_t(s.size())}, 0, inf, false);
    require(increasing(s, 0, 1, true) && ok_t,
            ctx.case_id + (endpoint ? ": expects s_points s~_1<..<s~_n in (0,1) and n+1 cumulative t_points"
                                    : ": expects s_points s~_1<..<s~_n in (0,1) and n increasing t_points"));
    std::vector<double> c(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) c[k] = t[k] - (k ? t[k - 1] : 0.0);
    return {{s, c}};
}

cplx meander_mc_weight(const simulate::PathSample& path, const std::vector<double>& c) {
    double e = 0;
    for (std::size_t k = 0; k < c.size(); ++k) e += c[k] * path.values[k];
    return std::exp(-e);
}

std::vector<PointReport> bme_endpoint(const CaseContext& ctx) {
    const auto pts = meander_points(ctx, {{{0.5}, {1.0, 0.5}}, {{0.3, 0.6}, {0.8, 0.5, 0.4}}}, true);
    const auto pair = pairs::meander_pair(grid_options(ctx));
    const auto& y = pair.y_space.grid;
    std::vector<PointReport> out;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto& [st, c] = pts[p];
        std::vector<double> obs = st;
        obs.push_back(1.0);
        const auto lhs = mc(ctx, "bes3-meander", p, [&](RngStream& rng) {
            return meander_mc_weight(simulate::sample_meander(rng, obs, MeanderMethod::bessel_bridge), c);
        });
        std::vector<double> t{0.0};
        for (std::size_t k = 0; k + 1 < c.size(); ++k) t.push_back(t.back() + c[k]);
        const TimePartition part(obs, t);
        const double cn = c.back();
        const CVector g = on_grid(y, [&](double v) { return 1 / (std::sqrt(2 * pi) * (cn * cn + v * v)); });
        const CVector jg = evaluate_G_chain(pair, part, g, kKernelRoute);
        const cplx rhs = integrate(y, jg, [&](double v) { return 2 * v * std::exp(-0.5 * st.front() * v * v); });
        out.push_back(make_point("s~=" + fmt_list(st) + " c=" + fmt_list(c), lhs, {rhs, kChainAllowance},
                                 scaled(ctx, 3 * lhs.error + kChainAllowance)));
    }
    return out;
}

std::vector<PointReport> bme_reversed(const CaseContext& ctx) {
    const auto pts = meander_points(ctx, {{{0.5}, {1.0}}, {{0.3, 0.6}, {0.6, 0.9}}}, false);
    const auto pair = pairs::meander_pair(grid_options(ctx));
    const auto& y = pair.y_space.grid;
    std::vector<PointReport> out;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto& [st, c] = pts[p];
        const auto lhs = mc(ctx, "bes3-meander", p, [&](RngStream& rng) {
            return meander_mc_weight(simulate::sample_meander(rng, st, MeanderMethod::bessel_bridge), c);
        });
        // chain run backwards from Y_{t_n} = y; the kernel is unchanged since x^2 q(x,y) = y^2 q(y,x)
        auto gauss = [&](double ds) {
            return on_grid(y, [ds](double v) { return std::exp(-0.5 * ds * v * v); });
        };
        CVector u = gauss(st.front());
        for (std::size_t k = 0; k < c.size(); ++k) {
            u = pair.y_transition(0.0, c[k])->apply(u);
            const double next = k + 1 < st.size() ? st[k + 1] : 1.0;
            u = u.cwiseProduct(gauss(next - st[k]));
        }
        const cplx rhs = std::sqrt(2 / pi) * integrate(y, u, [](double) { return 1.0; });
        out.push_back(make_point("s~=" + fmt_list(st) + " c=" + fmt_list(c), lhs, {rhs, kChainAllowance},
                                 scaled(ctx, 3 * lhs.error + kChainAllowance)));
    }
    return out;
}

// ---------------------------------------------------------------- Levy

std::vector<std::array<double, 2>> levy_points(const CaseContext& ctx, std::vector<std::array<double, 2>> defaults) {
    if (!has_partition(ctx)) return defaults;
    auto [s, t] = partition_override(ctx);
    require(s.size() == 1 && t.size() == 1 && s[0] > 0 && t[0] > 0,
            ctx.case_id + ": expects s_points=[v] and t_points=[lambda v], both positive");
    return {{t[0] / s[0], s[0]}};
}

std::vector<PointReport> levy_generic(const CaseContext& ctx) {
    const auto pts = levy_points(ctx, {{0.5, 1.0}, {1.0, 0.5}});
    const auto bm = kernels::LevyExponent::brownian(1.0);
    std::vector<PointReport> out;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto [lam, v] = pts[p];
        const auto grid = uniform_times(v, ctx.step);
        // x side: F(0) with psi(x) = 1 - e^{ix} along t = lambda s, f(x) = exp(-x^2/2)
        const auto lhs = mc(ctx, "bm", p, [&](RngStream& rng) {
            const auto path = simulate::sample_levy(rng, bm, grid);
            const cplx i = trapezoid(path, v, [](double x) { return std::exp(cplx(0, x)); });
            const double xv = path.values.back();
            return std::exp(-lam * v + lam * i) * std::exp(-0.5 * xv * xv);
        });
        // y side: (2 pi)^{-1/2} int G(y) dy, done in closed form over y for each Poisson path
        const auto rhs = mc(ctx, "poisson", p, [&](RngStream& rng) {
            const auto jumps = simulate::sample_poisson_jumps(rng, 1.0, lam * v);
            double a = 1.0, b = 0, c = 0, prev = 0;
            for (std::size_t k = 0; k <= jumps.size(); ++k) {
                const double end = k < jumps.size() ? jumps[k] : lam * v;
                const double w = (end - prev) / lam, n = double(k);
                a += w;
                b += w * n;
                c += w * n * n;
                prev = end;
            }
            const double n_end = double(jumps.size());
            b += n_end;
            c += n_end * n_end;
            return cplx(std::exp(-0.5 * (c - b * b / a)) / std::sqrt(a));
        });
        out.push_back(make_point("lambda=" + fmt(lam) + " v=" + fmt(v), lhs, rhs, scaled(ctx, 3 * (lhs.error + rhs.error))));
    }
    return out;
}

std::vector<PointReport> levy_corollary2(const CaseContext& ctx) {
    const double alpha = 0.5, beta = 0.2, lam = 0.4;
    double s = 0.5;
    if (has_partition(ctx)) {
        require(ctx.overrides.s_points && !ctx.overrides.t_points && ctx.overrides.s_points->size() == 1 &&
                    ctx.overrides.s_points->front() > 0,
                "levy-corollary2: expects s_points=[s] > 0 only");
        s = ctx.overrides.s_points->front();
    }
    const auto grid = uniform_times(s, ctx.step);
    const auto bm = kernels::LevyExponent::brownian(1.0);
    const auto lhs = mc(ctx, "bm", 0, [&](RngStream& rng) {
        const auto path = simulate::sample_levy(rng, bm, grid);
        const double l1 = trapezoid(path, s, [](double x) { return x; });
        const double l2 = trapezoid(path, s, [](double x) { return x * x; });
        return std::exp(cplx(-lam * l2, alpha * path.values.back() + beta * l1));
    });
    // D_u = sqrt(2 lambda) W_u - beta u; the start point is integrated out by conditioning D on its end value
    const auto drifted = kernels::LevyExponent::drifted_scaled_brownian(lam, -beta);
    const auto rhs = mc(ctx, "drifted-bm", 0, [&](RngStream& rng) {
        const auto path = simulate::sample_levy(rng, drifted, grid);
        const double shift = alpha - path.values.back();
        return std::exp(-trapezoid(path, s, [&](double d) { return bm(shift + d); }));
    });
    return {make_point("alpha=0.5 beta=0.2 lambda=0.4 s=" + fmt(s), lhs, rhs, scaled(ctx, 3 * (lhs.error + rhs.error)))};
}

std::vector<PointReport> levy_corollary3(const CaseContext& ctx) {
    const auto pts = levy_points(ctx, {{0.3, 0.5}});
    const double alpha = 1.0;
    const auto bm = kernels::LevyExponent::brownian(1.0);
    std::vector<PointReport> out;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto [lam, v] = pts[p];
        const auto grid = uniform_times(v, ctx.step);
        const auto lhs = mc(ctx, "bm", p, [&](RngStream& rng) {
            const auto path = simulate::sample_levy(rng, bm, grid);
            return std::exp(lam * trapezoid(path, v, [&](double x) { return std::exp(cplx(0, alpha * x)); }));
        });
        // truncate the sum over n where the Poisson(lambda v) tail drops below 1e-10
        const double mean = lam * v;
        int n_max = 0;
        double pmf = std::exp(-mean), cdf = pmf;
        while (1 - cdf >= 1e-10) {
            ++n_max;
            pmf *= mean / n_max;
            cdf += pmf;
        }
        const auto rhs = mc(ctx, "poisson", p, [&](RngStream& rng) {
            const auto jumps = simulate::sample_poisson_jumps(rng, 1.0, mean);
            const int n = int(jumps.size());
            if (n > n_max) return cplx(0);
            cplx integral = 0;
            double prev = 0;
            for (int k = 0; k <= n; ++k) {
                const double end = k < n ? jumps[std::size_t(k)] : mean;
                integral += (end - prev) * bm(alpha * (n - k));
                prev = end;
            }
            return std::exp(mean - integral / lam);
        });
        SideResult r = rhs;
        r.error += std::exp(mean) * 1e-10;
        out.push_back(make_point("lambda=" + fmt(lam) + " v=" + fmt(v) + " alpha=1", lhs, r,
                                 scaled(ctx, 3 * (lhs.error + rhs.error) + std::exp(mean) * 1e-10)));
    }
    return out;
}

// ---------------------------------------------------------------- CIR / birth-death

struct CirPoint {
    double alpha;
    std::vector<double> s;
    std::vector<double> t;
};

std::vector<CirPoint> cir_points(const CaseContext& ctx, std::vector<CirPoint> defaults) {
    if (!has_partition(ctx)) return defaults;
    auto [s, t] = partition_override(ctx);
    require(s.size() == t.size() && s.size() >= 2 && s.front() == 0.0 && t.front() == 0.0 &&
                increasing({s.begin() + 1, s.end()}, 0, inf, false) && increasing({t.begin() + 1, t.end()}, 0, inf, false),
            ctx.case_id + ": expects s_points 0=s0<..<sn and t_points 0=t0<..<tn");
    for (auto& d : defaults) {
        d.s = s;
        d.t = t;
    }
    return defaults;
}

std::vector<PointReport> cir_delta(const CaseContext& ctx) {
    const int m = 2;
    const auto pts = cir_points(ctx, {{0.0, {0.0, 0.3, 0.8}, {0.0, 0.4, 1.0}}, {0.5, {0.0, 0.3, 0.8}, {0.0, 0.4, 1.0}}});
    std::vector<PointReport> out;
    for (const auto& pt : pts) {
        const kernels::CIRParams cp{pt.alpha};
        const int kmax = 80;
        const auto pair = pairs::cir_pair(cp, kmax, grid_options(ctx));
        const TimePartition part(pt.s, pt.t);
        const auto& x = pair.x_space.grid;
        const double pim = specfun::pochhammer_weight(m, cp.alpha);
        const CVector f = on_grid(x, [&](double v) { return pim * specfun::laguerre(m, cp.alpha, v); });
        const CVector F = evaluate_F_chain(pair, part, f, kKernelRoute);
        CVector g = CVector::Zero(kmax + 1);
        g(m) = 1.0;
        const CVector G = evaluate_G_chain(pair, part, g, kKernelRoute);
        for (double target : {0.5, 1.0, 2.0, 4.0}) {
            const auto it = std::min_element(x.nodes().begin(), x.nodes().end(),
                                             [&](double a, double b) { return std::abs(a - target) < std::abs(b - target); });
            const auto i = std::size_t(it - x.nodes().begin());
            const double xi = x.node(i);
            const auto lag = specfun::laguerre_sequence(kmax, cp.alpha, xi);
            cplx series = 0;
            for (int k = 0; k <= kmax; ++k)
                series += G(k) * lag[std::size_t(k)] * specfun::pochhammer_weight(k, cp.alpha);
            out.push_back(make_point("alpha=" + fmt(cp.alpha) + " m=2 x=" + fmt(xi), {F(Eigen::Index(i)), kChainAllowance},
                                     {series, kChainAllowance}, scaled(ctx, 1e-5)));
        }
    }
    return out;
}

std::vector<PointReport> cir_exp(const CaseContext& ctx) {
    std::vector<PointReport> out;
    for (double lam : {0.3, 0.7}) {
        const auto pts = cir_points(ctx, {{0.0, {0.0, 0.4, 1.0}, {0.0, 0.5, 1.2}}});
        const auto& pt = pts.front();
        const kernels::CIRParams cp{0.0};
        // geometric initial law truncated where lambda (1 - lambda)^k < 1e-12
        const int k_trunc = int(std::ceil(std::log(1e-12 / lam) / std::log(1 - lam)));
        const int kmax = k_trunc + 60;
        const auto pair = pairs::cir_pair(cp, kmax, grid_options(ctx));
        const TimePartition part(pt.s, pt.t);
        const auto& x = pair.x_space.grid;
        const CVector F = evaluate_F_chain(pair, part, CVector::Ones(Eigen::Index(x.size())), kKernelRoute);
        const cplx lhs = integrate(x, F, [&](double v) { return std::exp(-v / lam); });
        CVector g = CVector::Zero(kmax + 1);
        g(0) = 1.0;
        const CVector G = evaluate_G_chain(pair, part, g, kKernelRoute);
        cplx rhs = 0;
        for (int k = 0; k <= k_trunc; ++k) rhs += G(k) * lam * std::pow(1 - lam, k);
        out.push_back(make_point("lambda=" + fmt(lam) + " s=" + fmt_list(pt.s) + " t=" + fmt_list(pt.t),
                                 {lhs, kChainAllowance}, {rhs, 1e-12}, scaled(ctx, 1e-4)));
    }
    return out;
}

// ---------------------------------------------------------------- killed BM / dual Hahn

std::vector<PointReport> kl_dualhahn(const CaseContext& ctx) {
    const kernels::DualHahnParams dh{2.0};
    std::vector<double> s{0.0, 0.4}, t{0.0, 0.6};
    if (has_partition(ctx)) {
        std::tie(s, t) = partition_override(ctx);
        require(s.size() == t.size() && s.size() >= 2 && s.front() == 0.0 && t.front() == 0.0,
                "kl-dualhahn: expects s_points and t_points starting at 0");
    }
    const auto pair = pairs::kl_pair(dh, grid_options(ctx));
    const TimePartition part(s, t);
    check_admissible(pair, part);
    const auto& x = pair.x_space.grid;
    const double tn = t.back();
    const CVector f = on_grid(x, [&](double v) { return std::exp((dh.b - tn) * v); });
    const CVector F = evaluate_F_chain(pair, part, f, kKernelRoute);

    std::vector<PointReport> out;
    for (double y : {0.3, 1.0, 2.0, 4.0}) {
        cplx lhs = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            lhs += F(Eigen::Index(i)) * specfun::bessel_k_imag(y, std::exp(x.node(i))) * x.weight(i);
        // G(y) = E[exp(-sum ds_k Y_{t_{k+1}}^2) | Y_0 = y] by nested quadrature of the dual Hahn kernel
        std::function<double(std::size_t, double)> G = [&](std::size_t k, double yk) -> double {
            if (k == part.n()) return 1.0;
            return quad_integrate(
                       [&](double z) {
                           return kernels::dual_hahn_kernel(t[k], t[k + 1], yk, z, dh) * std::exp(-part.ds(k) * z * z) *
                                  G(k + 1, z);
                       },
                       {0, inf, numerics::TailKind::exponential, {yk}}, 1e-10)
                .value;
        };
        const double rhs = kernels::dual_hahn_j(0.0, y, dh) * G(0, y);
        out.push_back(make_point("y=" + fmt(y), {lhs, 0.0}, {rhs, 0.0}, scaled(ctx, 1e-3 * std::abs(rhs))));
    }
    return out;
}

std::vector<DualityCase> build_registry() {
    const std::vector<std::string> quad{"s_points", "t_points", "grid_nodes", "x_max"};
    const std::vector<std::string> mc_quad{"s_points", "t_points", "grid_nodes", "x_max", "mc_paths", "step"};
    const std::vector<std::string> mc_bes{"s_points", "t_points", "grid_nodes", "x_max", "mc_paths"};
    const std::vector<std::string> mc_only{"s_points", "t_points", "mc_paths", "step"};
    using M = Method;
    std::vector<DualityCase> r{
        {"bex-prop",
         "E[e^{-sum dt_k B^ex_{s_k}} f(B^ex_{s_n})] = 2 int E_y[e^{-sum ds_k Y_{t_{k+1}}^2/2} g(Y_{t_n})] y^2 e^{-s_0 y^2/2} dy, y g = F_sin(h_{s_n} f)",
         "excursion from its entrance law against the radial Cauchy chain", M::chain_quadrature, M::chain_quadrature,
         "chain:excursion-kernel", "chain:cauchy-kernel", 0, 0, quad, [](const CaseContext& c) { return prop_case(c, false); }},
        {"bme-endpoint",
         "E[e^{-sum_{k<=n+1} c_k B^me_{s~_k}}] = sqrt(2/pi) int E_y[e^{-sum ds~_k Y_{t_k}^2/2} / (c_{n+1}^2 + Y_{t_n}^2)] y^2 dy",
         "meander including its endpoint at time 1", M::monte_carlo, M::chain_quadrature, "mc:bes3-bridge-meander",
         "chain:cauchy-kernel", 100000, 0, mc_bes, bme_endpoint},
        {"bme-prop",
         "E[e^{-sum dt_k B^me_{s_k}} f(B^me_{s_n})] = 2 int E_y[e^{-sum ds_k Y_{t_{k+1}}^2/2} g(Y_{t_n})] y^2 e^{-s_0 y^2/2} dy, y g = F_sin(h~_{s_n} f)",
         "meander from its entrance law against the radial Cauchy chain", M::chain_quadrature, M::chain_quadrature,
         "chain:meander-kernel", "chain:cauchy-kernel", 0, 0, quad, [](const CaseContext& c) { return prop_case(c, true); }},
        {"bme-reversed",
         "E[e^{-sum_{k<=n} c_k B^me_{s~_k}}] = sqrt(2/pi) int E[e^{-sum ds~_k Y_{t_k}^2/2} | Y_{t_n} = y] dy",
         "meander against the time-reversed radial Cauchy chain", M::monte_carlo, M::chain_quadrature,
         "mc:bes3-bridge-meander", "chain:cauchy-kernel-reversed", 100000, 0, mc_bes, bme_reversed},
        {"cir-delta",
         "pi_m E_x[e^{-sum dt_j X_{s_j}} L_m(X_{s_n})] = sum_k E_k[e^{-sum ds_j Y_{t_{j+1}}} 1{Y_{t_n}=m}] L_k(x) pi_k",
         "CIR diffusion against the birth-death chain, g = delta_m", M::chain_quadrature, M::chain_quadrature,
         "chain:cir-bessel-kernel", "chain:karlin-mcgregor+laguerre-series", 0, 0, quad, cir_delta},
        {"cir-exp",
         "int E_x[e^{-sum dt_j X_{s_j}}] e^{-x/lambda} dx = sum_k E_k[e^{-sum ds_j Y_{t_{j+1}}} 1{Y_{t_n}=0}] lambda (1-lambda)^k",
         "CIR from an exponential start against the birth-death chain from a geometric start", M::chain_quadrature,
         M::chain_quadrature, "chain:cir-bessel-kernel", "chain:karlin-mcgregor", 0, 0, quad, cir_exp},
        {"kl-dualhahn",
         "j_0 G = F_KL F, F(x) = E_x[e^{sum dt_k X_{s_k} + (b - t_n) X_{s_n}}], G(y) = E_y[e^{-sum ds_k Y_{t_{k+1}}^2}]",
         "Brownian motion killed at rate e^{2x} against the dual Hahn process", M::chain_quadrature,
         M::chain_quadrature, "chain:yakubovich-kernel+kl-forward", "quad:dual-hahn-kernel", 0, 0,
         {"s_points", "t_points", "grid_nodes"}, kl_dualhahn},
        {"levy-corollary2",
         "E[e^{i alpha X_s + i beta L_1(s) - lambda L_2(s)}] = int p_s(y, alpha) dy, p_s killed drifted Brownian kernel",
         "joint transform of a Brownian path and its first two area functionals", M::monte_carlo, M::monte_carlo,
         "mc:brownian-paths", "mc:drifted-brownian-paths", 200000, 1e-3, {"s_points", "mc_paths", "step"},
         levy_corollary2},
        {"levy-corollary3",
         "E[e^{lambda int_0^v e^{i alpha X_u} du}] = e^{lambda v} sum_n E[e^{-(1/lambda) int_0^{lambda v} Phi(alpha(n - N_u)) du} 1{N_{lambda v}=n}]",
         "exponential functional of Brownian motion against a Poisson path", M::monte_carlo, M::monte_carlo,
         "mc:brownian-paths", "mc:poisson-paths", 100000, 1e-3, mc_only, levy_corollary3},
        {"levy-generic",
         "G = F F for F(x) = E_x[e^{-int Psi(X_{s(w-)}) dt(w)} f(X_{s(1)})], G(y) = E_y[e^{-int Phi(Y^_{t(w)}) ds(w)} Ff(Y^_{t(1)})]",
         "Brownian motion against a Poisson process along s = v w, t = lambda v w", M::monte_carlo, M::monte_carlo,
         "mc:brownian-paths", "mc:poisson-paths", 100000, 1e-3, mc_only, levy_generic},
        {"spl-n1",
         "E[e^{-t_1 B^ex_{s~_1}}] = sqrt(2/pi) int E_y[e^{-(s~_1 Y_0^2 + (1 - s~_1) Y_{t_1}^2)/2}] y^2 dy",
         "excursion marginal against two-point radial Cauchy quadrature", M::chain_quadrature, M::chain_quadrature,
         "quad:excursion-entrance-density", "quad:cauchy-kernel-2d", 0, 0, {"s_points", "t_points"}, spl_n1},
        {"spl-n2",
         "E[e^{-sum (t_k - t_{k-1}) B^ex_{s~_k}}] = sqrt(2/pi) int E_y[e^{-sum (s~_{k+1} - s~_k) Y_{t_k}^2/2}] y^2 dy",
         "Vervaat excursion paths against the radial Cauchy chain", M::monte_carlo, M::chain_quadrature,
         "mc:vervaat-excursion", "chain:cauchy-kernel", 100000, 1e-3, mc_quad, spl_n2},
    };
    std::sort(r.begin(), r.end(), [](const DualityCase& a, const DualityCase& b) { return a.id < b.id; });
    return r;
}

}  // namespace

bool DualityCase::accepts(std::string_view key) const {
    return std::find(accepted_overrides.begin(), accepted_overrides.end(), key) != accepted_overrides.end();
}

const std::vector<DualityCase>& case_registry() {
    static const std::vector<DualityCase> registry = build_registry();
    return registry;
}

const DualityCase& find_case(std::string_view id) {
    for (const auto& c : case_registry())
        if (c.id == id) return c;
    throw ConfigError("unknown case id '" + std::string(id) + "'");
}

void validate_overrides(const DualityCase& c, const CaseOverrides& ov) {
    const std::pair<const char*, bool> given[] = {
        {"s_points", ov.s_points.has_value()}, {"t_points", ov.t_points.has_value()},
        {"grid_nodes", ov.grid_nodes.has_value()}, {"x_max", ov.x_max.has_value()},
        {"mc_paths", ov.mc_paths.has_value()}, {"step", ov.step.has_value()}};
    for (const auto& [key, set] : given)
        if (set && !c.accepts(key)) throw ConfigError(c.id + ": override '" + key + "' is not supported by this case");
    if (!(ov.tolerance_scale > 0)) throw ConfigError("tolerance_scale must be positive");
    if (ov.grid_nodes && (*ov.grid_nodes < 2 || *ov.grid_nodes > 64)) throw ConfigError("grid_nodes must be in [2, 64]");
    if (ov.x_max && !(*ov.x_max > 0)) throw ConfigError("x_max must be positive");
    if (ov.mc_paths && *ov.mc_paths < 2) throw ConfigError("mc_paths must be at least 2");
    if (ov.step && !(*ov.step > 0 && *ov.step <= 0.1)) throw ConfigError("step must be in (0, 0.1]");

}

DualityCaseReport run_duality_case(const DualityCase& c, std::uint64_t seed, const CaseOverrides& ov) {
    validate_overrides(c, ov);
    CaseContext ctx{c.id, seed, ov, ov.mc_paths.value_or(c.default_mc_paths), ov.step.value_or(c.default_step)};
    DualityCaseReport rep;
    rep.case_id = c.id;
    rep.seed = seed;
    rep.lhs_route = c.lhs_route;
    rep.rhs_route = c.rhs_route;
    if (c.lhs_route == c.rhs_route) rep.warnings.push_back("both sides use the same code path");
    if (c.lhs_method == Method::monte_carlo && c.rhs_method == Method::monte_carlo && c.lhs_route == c.rhs_route)
        rep.warnings.push_back("identical methods on both sides");

    const auto t0 = std::chrono::steady_clock::now();
    try {
        rep.points = c.evaluate(ctx);
        if (rep.points.empty()) throw CaseDefinitionError(c.id + ": no parameter points");
        const auto worst = std::max_element(rep.points.begin(), rep.points.end(), [](const auto& a, const auto& b) {
            return a.residual / a.budget < b.residual / b.budget;
        });
        rep.lhs = worst->lhs;
        rep.rhs = worst->rhs;
        rep.residual = worst->residual;
        rep.budget = worst->budget;
        rep.passed = std::all_of(rep.points.begin(), rep.points.end(), [](const auto& p) { return p.passed; });
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rep.passed = false;
        rep.reason = e.what();
        rep.residual = std::numeric_limits<double>::quiet_NaN();
    }
    rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace duality::engine
