#include "duality/engine.hpp"

#include <cmath>

#include "duality/errors.hpp"

namespace duality::engine {

namespace {

CVector multiply(const CVector& v, const numerics::QuadratureGrid& g, const std::function<cplx(double)>& fn) {
    CVector out = v;
    for (std::size_t i = 0; i < g.size(); ++i) out(Eigen::Index(i)) *= fn(g.node(i));
    return out;
}

CVector exp_factor(const CVector& v, const numerics::QuadratureGrid& g, const std::function<cplx(double)>& rate,
                   double dt) {
    if (dt == 0.0) return v;
    return multiply(v, g, [&](double x) { return std::exp(-dt * rate(x)); });
}

void check_lengths(const SpectralDualityPair& pair, const CVector& v, bool x_side) {
    const auto n = x_side ? pair.x_space.grid.size() : pair.y_space.grid.size();
    if (v.size() != Eigen::Index(n)) throw ParameterError("chain: function length does not match the pair's grid");
}

void check_x_tail(const SpectralDualityPair& pair, const CVector& v, double tol) {
    const auto& w = pair.x_tail_weight ? pair.x_tail_weight : pair.x_space.reference_density;
    transforms::check_tail_mass(pair.x_space.grid, v, tol, w);
}

}  // namespace

void check_admissible(const SpectralDualityPair& pair, const TimePartition& part) {
    if (!pair.contraction_violated) return;
    const auto& t = part.t();
    if (part.n() > 2) throw AdmissibilityError("non-contractive pair: at most two steps are admissible");
    if (t.front() < 0.0) throw AdmissibilityError("non-contractive pair: t_0 must be nonnegative");
    if (!(t.back() < pair.t_limit - 0.2))
        throw AdmissibilityError("non-contractive pair: t_n must stay below t_limit - 0.2");
}

CVector evaluate_F_chain(const SpectralDualityPair& pair, const TimePartition& part, const CVector& f,
                         const ChainOptions& opt) {
    check_lengths(pair, f, true);
    check_admissible(pair, part);
    const auto& xg = pair.x_space.grid;
    const auto& s = part.s();
    const std::size_t n = part.n();
    if (opt.route == Route::kernel) {
        if (!pair.x_transition) throw ParameterError("pair has no kernel route on the x side");
        CVector v = f;
        for (std::size_t k = n; k-- > 0;) {
            if (part.ds(k) > 0) v = pair.x_transition(s[k], s[k + 1])->apply(v);
            v = exp_factor(v, xg, pair.psi, part.dt(k));
        }
        return multiply(v, xg, [&](double x) { return cplx(pair.h(s.front(), x)); });
    }
    const auto& yg = pair.y_space.grid;
    CVector v = multiply(f, xg, [&](double x) { return cplx(pair.h(s.back(), x)); });
    for (std::size_t k = n; k-- > 0;) {
        if (part.ds(k) > 0) {
            check_x_tail(pair, v, opt.tail_tol);
            CVector w = exp_factor(pair.forward.apply(v), yg, pair.phi, part.ds(k));
            v = pair.inverse.apply(w);
        }
        v = exp_factor(v, xg, pair.psi, part.dt(k));
    }
    return v;
}

CVector evaluate_G_chain(const SpectralDualityPair& pair, const TimePartition& part, const CVector& g,
                         const ChainOptions& opt) {
    check_lengths(pair, g, false);
    check_admissible(pair, part);
    const auto& yg = pair.y_space.grid;
    const auto& t = part.t();
    const std::size_t n = part.n();
    if (opt.route == Route::kernel) {
        if (!pair.y_transition) throw ParameterError("pair has no kernel route on the y side");
        CVector v = g;
        for (std::size_t k = n; k-- > 0;) {
            v = exp_factor(v, yg, pair.phi, part.ds(k));
            if (part.dt(k) > 0) v = pair.y_transition(t[k], t[k + 1])->apply(v);
        }
        return multiply(v, yg, [&](double y) { return cplx(pair.j(t.front(), y)); });
    }
    const auto& xg = pair.x_space.grid;
    CVector w = multiply(g, yg, [&](double y) { return cplx(pair.j(t.back(), y)); });
    for (std::size_t k = n; k-- > 0;) {
        w = exp_factor(w, yg, pair.phi, part.ds(k));
        if (part.dt(k) > 0) {
            CVector v = exp_factor(pair.inverse.apply(w), xg, pair.psi, part.dt(k));
            check_x_tail(pair, v, opt.tail_tol);
            w = pair.forward.apply(v);
        }
    }
    return w;
}

CVector coupled_g(const SpectralDualityPair& pair, const TimePartition& part, const CVector& f) {
    check_lengths(pair, f, true);
    const auto& xg = pair.x_space.grid;
    const auto& yg = pair.y_space.grid;
    const double sn = part.s().back(), tn = part.t().back();
    CVector hf = multiply(f, xg, [&](double x) { return cplx(pair.h(sn, x)); });
    CVector g = pair.forward.apply(hf);
    for (std::size_t i = 0; i < yg.size(); ++i) {
        const double jv = pair.j(tn, yg.node(i));
        if (!(jv > 0)) throw CaseDefinitionError("coupled_g: j vanishes on the y grid");
        g(Eigen::Index(i)) /= jv;
    }
    return g;
}

IntegralFormResult evaluate_integral_form(const SpectralDualityPair& pair, const TimeMap& s_map, const TimeMap& t_map,
                                          const CVector& f, std::vector<int> levels, const ChainOptions& opt,
                                          double window) {
    if (levels.empty()) throw ParameterError("evaluate_integral_form: no refinement levels");
    if (std::abs(s_map(0.0)) > 0 || std::abs(t_map(0.0)) > 0)
        throw ParameterError("evaluate_integral_form: maps must start at 0");
    IntegralFormResult r;
    r.levels = levels;
    for (int n : levels) {
        if (n < 1) throw ParameterError("evaluate_integral_form: levels must be positive");
        std::vector<double> s(std::size_t(n) + 1), t(std::size_t(n) + 1);
        for (int k = 0; k <= n; ++k) {
            s[std::size_t(k)] = s_map(double(k) / n);
            t[std::size_t(k)] = t_map(double(k) / n);
        }
        r.values.push_back(evaluate_F_chain(pair, TimePartition(std::move(s), std::move(t)), f, opt));
    }
    const auto& xg = pair.x_space.grid;
    for (std::size_t l = 1; l < r.values.size(); ++l) {
        double d = 0;
        for (std::size_t i = 0; i < xg.size(); ++i)
            if (std::abs(xg.node(i)) <= window)
                d = std::max(d, std::abs(r.values[l](Eigen::Index(i)) - r.values[l - 1](Eigen::Index(i))));
        r.increments.push_back(d);
    }
    if (r.increments.size() >= 2) {
        const double a = r.increments[r.increments.size() - 2], b = r.increments.back();
        r.observed_order = b > 0 ? std::log2(a / b) : std::numeric_limits<double>::infinity();
    }
    r.value = r.values.back();
    return r;
}

}  // namespace duality::engine
