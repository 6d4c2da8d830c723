#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "duality/cli.hpp"

namespace duality::cli {

namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

std::string bool_str(bool b) { return b ? "true" : "false"; }

// The fixed leading fields shared by both formats.
struct Fixed {
    std::string lhs, lhs_err, rhs, rhs_err, residual, budget, passed, runtime, seed;
};

Fixed fixed_fields(const engine::DualityCaseReport& r, bool timing) {
    return {format_number(r.lhs.value.real()), format_number(r.lhs.error), format_number(r.rhs.value.real()),
            format_number(r.rhs.error),        format_number(r.residual),  format_number(r.budget),
            bool_str(r.passed),                timing ? format_number(r.runtime_s) : "null",
            std::to_string(r.seed)};
}

}  // namespace

std::string format_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_record(const engine::DualityCaseReport& r, bool timing) {
    const auto f = fixed_fields(r, timing);
    std::string s = "{\"case\":" + quote(r.case_id);
    s += ",\"lhs\":" + f.lhs + ",\"lhs_err\":" + f.lhs_err + ",\"rhs\":" + f.rhs + ",\"rhs_err\":" + f.rhs_err;
    s += ",\"residual\":" + f.residual + ",\"budget\":" + f.budget + ",\"passed\":" + f.passed;
    s += ",\"runtime_s\":" + f.runtime + ",\"seed\":" + f.seed;
    s += ",\"lhs_imag\":" + format_number(r.lhs.value.imag()) + ",\"rhs_imag\":" + format_number(r.rhs.value.imag());
    s += ",\"lhs_route\":" + quote(r.lhs_route) + ",\"rhs_route\":" + quote(r.rhs_route);
    s += ",\"reason\":" + (r.reason.empty() ? std::string("null") : quote(r.reason));
    s += ",\"warnings\":[";
    for (std::size_t i = 0; i < r.warnings.size(); ++i) s += (i ? "," : "") + quote(r.warnings[i]);
    s += "],\"points\":[";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        if (i) s += ",";
        s += "{\"label\":" + quote(p.label) + ",\"lhs\":" + format_number(p.lhs.value.real()) +
             ",\"lhs_imag\":" + format_number(p.lhs.value.imag()) + ",\"lhs_err\":" + format_number(p.lhs.error) +
             ",\"rhs\":" + format_number(p.rhs.value.real()) + ",\"rhs_imag\":" + format_number(p.rhs.value.imag()) +
             ",\"rhs_err\":" + format_number(p.rhs.error) + ",\"residual\":" + format_number(p.residual) +
             ",\"budget\":" + format_number(p.budget) + ",\"passed\":" + bool_str(p.passed) + "}";
    }
    s += "]}";
    return s;
}

std::string csv_header() { return "case,lhs,lhs_err,rhs,rhs_err,residual,budget,passed,runtime_s,seed"; }

std::string csv_record(const engine::DualityCaseReport& r, bool timing) {
    auto cell = [](const std::string& v) { return v == "null" ? std::string() : v; };
    const auto f = fixed_fields(r, timing);
    return r.case_id + "," + cell(f.lhs) + "," + cell(f.lhs_err) + "," + cell(f.rhs) + "," + cell(f.rhs_err) + "," +
           cell(f.residual) + "," + cell(f.budget) + "," + f.passed + "," + cell(f.runtime) + "," + f.seed;
}

}  // namespace duality::cli
