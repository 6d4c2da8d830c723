#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duality/numerics.hpp"

namespace duality::engine {

enum class Method { chain_quadrature, monte_carlo };
std::string_view to_string(Method m);

// Per-run knobs. Unset fields keep the case defaults; a case rejects overrides it cannot honour.
struct CaseOverrides {
    std::optional<std::vector<double>> s_points;
    std::optional<std::vector<double>> t_points;
    std::optional<int> grid_nodes;  // Gauss-Legendre nodes per panel
    std::optional<double> x_max;
    std::optional<std::int64_t> mc_paths;
    std::optional<double> step;  // path discretization step for Monte Carlo routes
    double tolerance_scale = 1.0;
};

struct SideResult {
    cplx value{0.0, 0.0};
    double error = 0;  // standard error for Monte Carlo, error allowance for quadrature
};

struct PointReport {
    std::string label;
    SideResult lhs;
    SideResult rhs;
    double residual = 0;
    double budget = 0;
    bool passed = false;
};

struct DualityCaseReport {
    std::string case_id;
    // worst point, measured by residual / budget
    SideResult lhs;
    SideResult rhs;
    double residual = 0;
    double budget = 0;
    bool passed = false;
    double runtime_s = 0;
    std::uint64_t seed = 0;
    std::string lhs_route;
    std::string rhs_route;
    std::vector<PointReport> points;
    std::string reason;  // set when evaluation stopped on an error
    std::vector<std::string> warnings;
};

struct CaseContext {
    std::string case_id;
    std::uint64_t seed = 0;
    CaseOverrides overrides;
    std::int64_t mc_paths = 0;
    double step = 0;
};

struct DualityCase {
    std::string id;
    std::string anchor;   // the identity checked, written out
    std::string summary;  // one line
    Method lhs_method = Method::chain_quadrature;
    Method rhs_method = Method::chain_quadrature;
    std::string lhs_route;  // code-path tags; the two must differ
    std::string rhs_route;
    std::int64_t default_mc_paths = 0;  // 0 for cases without a Monte Carlo side
    double default_step = 1e-3;
    std::vector<std::string> accepted_overrides;  // names of CaseOverrides fields the case honours
    bool accepts(std::string_view key) const;
    std::function<std::vector<PointReport>(const CaseContext&)> evaluate;
};

// Registered cases, sorted by id.
const std::vector<DualityCase>& case_registry();
// Throws ConfigError for an unknown id.
const DualityCase& find_case(std::string_view id);

// Throws ConfigError for overrides the case does not accept or values out of range.
void validate_overrides(const DualityCase& c, const CaseOverrides& overrides);

// Evaluates both sides at every parameter point of the case. Numerical failures inside the case are
// reported as a failed record with a reason; invalid overrides throw ConfigError.
DualityCaseReport run_duality_case(const DualityCase& c, std::uint64_t seed, const CaseOverrides& overrides = {});

}  // namespace duality::engine
