#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "duality/cli.hpp"
#include "duality/errors.hpp"

namespace duality::cli {

namespace {

using nlohmann::json;

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: '" + key + "' has the wrong type");
    }
}

std::int64_t get_count(const json& j, const std::string& key) {
    if (!j.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
    return j.get<std::int64_t>();
}

std::vector<double> get_points(const json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("config: '" + key + "' must be an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw ConfigError("config: '" + key + "' must be an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

engine::CaseOverrides parse_overrides(const json& j, const std::string& id) {
    if (!j.is_object()) throw ConfigError("config: overrides for '" + id + "' must be an object");
    engine::CaseOverrides o;
    for (const auto& [key, v] : j.items()) {
        const std::string where = id + "." + key;
        if (key == "s_points") o.s_points = get_points(v, where);
        else if (key == "t_points") o.t_points = get_points(v, where);
        else if (key == "grid_nodes") o.grid_nodes = int(get_count(v, where));
        else if (key == "x_max") o.x_max = get_as<double>(v, where);
        else if (key == "mc_paths") o.mc_paths = get_count(v, where);
        else if (key == "step") o.step = get_as<double>(v, where);
        else if (key == "tolerance_scale") o.tolerance_scale = get_as<double>(v, where);
        else throw ConfigError("config: unknown override '" + where + "'");
    }
    return o;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    RunConfig cfg;
    for (const auto& [key, v] : j.items()) {
        if (key == "cases") {
            if (v.is_string()) cfg.cases = {v.get<std::string>()};
            else cfg.cases = get_as<std::vector<std::string>>(v, key);
        } else if (key == "seed") {
            if (!v.is_number_unsigned()) throw ConfigError("config: 'seed' must be a nonnegative integer");
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "out") {
            cfg.out = get_as<std::string>(v, key);
        } else if (key == "format") {
            const auto f = get_as<std::string>(v, key);
            if (f == "json") cfg.format = Format::json;
            else if (f == "csv") cfg.format = Format::csv;
            else throw ConfigError("config: format must be json or csv");
        } else if (key == "timing") {
            cfg.timing = get_as<bool>(v, key);
        } else if (key == "mc_paths") {
            cfg.mc_paths = get_count(v, key);
        } else if (key == "grid_nodes") {
            cfg.grid_nodes = int(get_count(v, key));
        } else if (key == "tolerance_scale") {
            cfg.tolerance_scale = get_as<double>(v, key);
        } else if (key == "overrides") {
            if (!v.is_object()) throw ConfigError("config: 'overrides' must be an object keyed by case id");
            for (const auto& [id, o] : v.items()) cfg.per_case[id] = parse_overrides(o, id);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<const engine::DualityCase*> select_cases(const RunConfig& cfg) {
    if (cfg.cases.empty()) throw ConfigError("no cases selected");
    std::set<std::string> wanted;
    for (const auto& id : cfg.cases) {
        if (id == "all") {
            if (cfg.cases.size() != 1) throw ConfigError("'all' cannot be combined with case ids");
            for (const auto& c : engine::case_registry()) wanted.insert(c.id);
        } else {
            engine::find_case(id);
            wanted.insert(id);
        }
    }
    for (const auto& [id, o] : cfg.per_case) {
        engine::find_case(id);
        (void)o;
    }
    std::vector<const engine::DualityCase*> out;
    for (const auto& c : engine::case_registry())
        if (wanted.count(c.id)) out.push_back(&c);
    return out;
}

engine::CaseOverrides resolve_overrides(const RunConfig& cfg, const engine::DualityCase& c) {
    engine::CaseOverrides o;
    if (auto it = cfg.per_case.find(c.id); it != cfg.per_case.end()) o = it->second;
    if (cfg.mc_paths && c.accepts("mc_paths")) o.mc_paths = cfg.mc_paths;
    if (cfg.grid_nodes && c.accepts("grid_nodes")) o.grid_nodes = cfg.grid_nodes;
    if (cfg.tolerance_scale) o.tolerance_scale = *cfg.tolerance_scale;
    engine::validate_overrides(c, o);
    return o;
}

}  // namespace duality::cli
