#include <omp.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "duality/cli.hpp"
#include "duality/errors.hpp"
#include "duality/parallel.hpp"

namespace duality::cli {

void cmd_list(std::ostream& out) {
    for (const auto& c : engine::case_registry()) out << c.id << "\t" << c.anchor << "\n";
}

int cmd_check(const RunConfig& cfg, std::ostream& err) {
    const auto cases = select_cases(cfg);
    std::vector<engine::CaseOverrides> overrides;
    for (const auto* c : cases) overrides.push_back(resolve_overrides(cfg, *c));

    std::ostringstream report;
    if (cfg.format == Format::csv) report << csv_header() << "\n";
    bool all_passed = true;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto r = engine::run_duality_case(*cases[i], cfg.seed, overrides[i]);
        all_passed = all_passed && r.passed;
        if (!r.reason.empty()) err << r.case_id << ": " << r.reason << "\n";
        for (const auto& w : r.warnings) err << r.case_id << ": warning: " << w << "\n";
        report << (cfg.format == Format::csv ? csv_record(r, cfg.timing) : json_record(r, cfg.timing)) << "\n";
    }

    if (cfg.out.empty()) {
        std::cout << report.str() << std::flush;
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + cfg.out + "'");
        f << report.str();
    }
    return all_passed ? 0 : 1;
}

int run(int argc, char** argv) {
    CLI::App app{"Numerical checks of dual representations for Laplace transforms of Markov processes"};
    app.require_subcommand(1);
    auto* list = app.add_subcommand("list", "List registered cases with their identities");
    auto* check = app.add_subcommand("check", "Run cases and write a report");

    std::vector<std::string> ids;
    std::string config_path, out, format;
    std::uint64_t seed = 42;
    std::int64_t mc_paths = 0;
    int grid_nodes = 0;
    double tolerance_scale = 1;
    bool timing = false;
    check->add_option("cases", ids, "Case ids, or 'all' (default: the config file's list)");
    auto* o_config = check->add_option("--config", config_path, "JSON config file");
    auto* o_seed = check->add_option("--seed", seed, "Random seed (default 42)");
    auto* o_out = check->add_option("--out", out, "Report path (default stdout)");
    auto* o_format = check->add_option("--format", format, "json or csv (default json)")
                         ->check(CLI::IsMember({"json", "csv"}));
    auto* o_paths = check->add_option("--mc-paths", mc_paths, "Monte Carlo paths per side");
    auto* o_nodes = check->add_option("--grid-nodes", grid_nodes, "Gauss-Legendre nodes per panel");
    auto* o_scale = check->add_option("--tolerance-scale", tolerance_scale, "Multiplier on every budget");
    check->add_flag("--timing", timing, "Record runtime_s in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    omp_set_num_threads(worker_count());
    try {
        if (*list) {
            cmd_list(std::cout);
            return 0;
        }
        RunConfig cfg = *o_config ? load_config(config_path) : RunConfig{};
        if (!ids.empty()) cfg.cases = ids;
        if (*o_seed) cfg.seed = seed;
        if (*o_out) cfg.out = out;
        if (*o_format) cfg.format = format == "csv" ? Format::csv : Format::json;
        if (*o_paths) cfg.mc_paths = mc_paths;
        if (*o_nodes) cfg.grid_nodes = grid_nodes;
        if (*o_scale) cfg.tolerance_scale = tolerance_scale;
        if (timing) cfg.timing = true;
        return cmd_check(cfg, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace duality::cli
