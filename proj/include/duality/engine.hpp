#pragma once

#include <functional>
#include <vector>

#include "duality/transforms.hpp"

namespace duality::engine {

using transforms::SpectralDualityPair;
using transforms::TimePartition;

enum class Route {
    spectral,  // alternating multiplication operators and transforms
    kernel     // products of transition kernel matrices
};

struct ChainOptions {
    Route route = Route::spectral;
    double tail_tol = 1e-6;  // relative tail mass allowed before each transform
};

// h_{s_0} F on the x grid, F(x) = E[exp(-sum dt_k psi(X_{s_k})) f(X_{s_n}) | X_{s_0} = x].
CVector evaluate_F_chain(const SpectralDualityPair& pair, const TimePartition& part, const CVector& f,
                         const ChainOptions& opt = {});

// j_{t_0} G on the y grid, G(y) = E[exp(-sum ds_k phi(Y_{t_{k+1}})) g(Y_{t_n}) | Y_{t_0} = y].
CVector evaluate_G_chain(const SpectralDualityPair& pair, const TimePartition& part, const CVector& g,
                         const ChainOptions& opt = {});

// The function g with j_{t_n} g = F(h_{s_n} f).
CVector coupled_g(const SpectralDualityPair& pair, const TimePartition& part, const CVector& f);

// Throws AdmissibilityError when a pair without contraction receives exponents outside its budget.
void check_admissible(const SpectralDualityPair& pair, const TimePartition& part);

using TimeMap = std::function<double(double)>;

struct IntegralFormResult {
    std::vector<int> levels;
    std::vector<CVector> values;    // F on the x grid at each level
    std::vector<double> increments;  // sup-norm of successive differences over the monitored window
    double observed_order = 0;       // log2 of the last increment ratio
    CVector value;                   // finest level
};

// Dyadic partitions s_{n,k} = s(k/n), t_{n,k} = t(k/n) pushed through evaluate_F_chain.
// Requires h = j = 1. `window` limits the convergence monitor to |x| <= window.
IntegralFormResult evaluate_integral_form(const SpectralDualityPair& pair, const TimeMap& s_map, const TimeMap& t_map,
                                          const CVector& f, std::vector<int> levels = {8, 16, 32},
                                          const ChainOptions& opt = {}, double window = 8.0);

}  // namespace duality::engine
