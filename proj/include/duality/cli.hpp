#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "duality/cases.hpp"

namespace duality::cli {

enum class Format { json, csv };

struct RunConfig {
    std::vector<std::string> cases;  // ids, or the single entry "all"
    std::uint64_t seed = 42;
    std::string out;  // empty: stdout
    Format format = Format::json;
    bool timing = false;  // runtime_s is null unless set, keeping reports byte-identical
    // applied to every selected case that accepts them
    std::optional<std::int64_t> mc_paths;
    std::optional<int> grid_nodes;
    std::optional<double> tolerance_scale;
    // strict: each key must be accepted by its case
    std::map<std::string, engine::CaseOverrides> per_case;
};

// Parses a JSON config object; throws ConfigError on malformed input or unknown keys.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Resolved case list in registry order; throws ConfigError on unknown ids.
std::vector<const engine::DualityCase*> select_cases(const RunConfig& cfg);
// Per-case overrides with the global knobs folded in; validated against the case.
engine::CaseOverrides resolve_overrides(const RunConfig& cfg, const engine::DualityCase& c);

// Numbers use 17 significant digits; NaN and infinities become null (empty in CSV).
std::string format_number(double v);
std::string json_record(const engine::DualityCaseReport& r, bool timing);
std::string csv_header();
std::string csv_record(const engine::DualityCaseReport& r, bool timing);

void cmd_list(std::ostream& out);
// Exit code 0 when every case passed, 1 otherwise. Config problems throw ConfigError before any case runs.
int cmd_check(const RunConfig& cfg, std::ostream& err);

// Entry point of the duality_lab executable.
int run(int argc, char** argv);

}  // namespace duality::cli
