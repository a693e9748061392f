#include "cli/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hetnet/error.hpp"
#include "json.hpp"

namespace hetnet::cli {

namespace {

using nlohmann::json;
using experiments::SweepSpec;

/// Fields that accept a `_db` twin.
constexpr std::array<std::string_view, 8> kDecibelFields{"P_m", "P_s", "B_m", "B_s", "beta", "T_s", "T_b", "T_m"};

constexpr std::array<std::string_view, 28> kPlainKeys{
    "lambda_m",   "lambda_s",        "alpha_m",          "alpha_s",        "eta",           "kappa",
    "self_interference", "mode",     "modes",            "sweep_parameter", "grid",         "outputs",
    "name",       "notes",           "mc_trials",        "seed",           "window_half_width", "wrap",
    "far_field_mean", "fixed_count", "abs_tol",          "rel_tol",        "max_subdivisions", "truncation_radius",
    "density",    "approx_ac",       "macro_literal_2d", "out"};

bool is_decibel_field(std::string_view key) {
    return std::find(kDecibelFields.begin(), kDecibelFields.end(), key) != kDecibelFields.end();
}

/// Canonical field of a key ("B_s_db" -> "B_s"); empty when unknown.
std::string field_of(std::string_view key) {
    if (key.size() > 3 && key.ends_with("_db") && is_decibel_field(key.substr(0, key.size() - 3)))
        return std::string(key.substr(0, key.size() - 3));
    if (is_decibel_field(key)) return std::string(key);
    if (std::find(kPlainKeys.begin(), kPlainKeys.end(), key) != kPlainKeys.end()) return std::string(key);
    return {};
}

double number(const json& v, std::string_view key) {
    if (!v.is_number()) throw InputError("'" + std::string(key) + "' must be a number");
    return v.get<double>();
}

bool boolean(const json& v, std::string_view key) {
    if (!v.is_boolean()) throw InputError("'" + std::string(key) + "' must be true or false");
    return v.get<bool>();
}

std::string text(const json& v, std::string_view key) {
    if (!v.is_string()) throw InputError("'" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t count(const json& v, std::string_view key) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw InputError("'" + std::string(key) + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<std::string> strings(const json& v, std::string_view key) {
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) throw InputError("'" + std::string(key) + "' must be a string or a list of strings");
    std::vector<std::string> out;
    for (const json& e : v) out.push_back(text(e, key));
    return out;
}

double* decibel_target(RunConfig& cfg, std::string_view field) {
    NetworkParams& p = cfg.spec.base_params;
    Thresholds& t = cfg.spec.base_thresholds;
    if (field == "P_m") return &p.P_m;
    if (field == "P_s") return &p.P_s;
    if (field == "B_m") return &p.B_m;
    if (field == "B_s") return &p.B_s;
    if (field == "beta") return &p.beta;
    if (field == "T_s") return &t.T_s;
    if (field == "T_b") return &t.T_b;
    return &t.T_m;
}

analytic::DensityForm density_from_string(std::string_view s) {
    if (s == "exact") return analytic::DensityForm::Exact;
    if (s == "mixed-partial" || s == "mixed_partial") return analytic::DensityForm::MixedPartial;
    throw InputError("unknown density form '" + std::string(s) + "' (expected exact or mixed-partial)");
}

SelfInterferencePower self_interference_from_string(std::string_view s) {
    if (s == "pico") return SelfInterferencePower::Pico;
    if (s == "macro") return SelfInterferencePower::Macro;
    throw InputError("unknown self_interference power '" + std::string(s) + "' (expected pico or macro)");
}

/// Store one key; throws InputError without location.
void apply_key(RunConfig& cfg, const std::string& key, const json& v) {
    const std::string field = field_of(key);
    if (field.empty()) throw InputError("unknown key '" + key + "'");
    SweepSpec& s = cfg.spec;
    NetworkParams& p = s.base_params;
    numerics::QuadratureSpec& q = s.analytic.quad;

    if (is_decibel_field(field)) {
        const double x = number(v, key);
        *decibel_target(cfg, field) = key == field ? x : db_to_linear(x);
    } else if (key == "lambda_m") {
        p.lambda_m = number(v, key);
    } else if (key == "lambda_s") {
        p.lambda_s = number(v, key);
    } else if (key == "alpha_m") {
        p.alpha_m = number(v, key);
    } else if (key == "alpha_s") {
        p.alpha_s = number(v, key);
    } else if (key == "eta") {
        p.eta = number(v, key);
    } else if (key == "kappa") {
        p.kappa = number(v, key);
    } else if (key == "self_interference") {
        p.self_interference = self_interference_from_string(text(v, key));
    } else if (key == "mode" || key == "modes") {
        s.modes.clear();
        for (const std::string& m : strings(v, key)) s.modes.push_back(duplex_mode_from_string(m));
    } else if (key == "sweep_parameter") {
        s.swept_parameter = experiments::swept_parameter_from_string(text(v, key));
    } else if (key == "grid") {
        if (!v.is_array()) throw InputError("'grid' must be a list of numbers");
        s.grid.clear();
        for (const json& e : v) s.grid.push_back(number(e, key));
        cfg.has_sweep = true;
    } else if (key == "outputs") {
        s.outputs.clear();
        for (const std::string& o : strings(v, key)) s.outputs.push_back(experiments::output_from_string(o));
    } else if (key == "name") {
        s.name = text(v, key);
    } else if (key == "notes") {
        s.notes = strings(v, key);
    } else if (key == "mc_trials") {
        s.mc_trials = count(v, key);
    } else if (key == "seed") {
        s.master_seed = count(v, key);
    } else if (key == "window_half_width") {
        s.simulation.window.half_width = number(v, key);
    } else if (key == "wrap") {
        s.simulation.window.wrap = boolean(v, key);
    } else if (key == "far_field_mean") {
        s.simulation.window.far_field_mean = boolean(v, key);
    } else if (key == "fixed_count") {
        s.simulation.fixed_count = boolean(v, key);
    } else if (key == "abs_tol") {
        q.abs_tol = number(v, key);
    } else if (key == "rel_tol") {
        q.rel_tol = number(v, key);
    } else if (key == "max_subdivisions") {
        const double n = number(v, key);
        if (n != std::floor(n) || n < 1 || n > 1e7) throw InputError("'max_subdivisions' must be a positive integer");
        q.max_subdivisions = static_cast<int>(n);
    } else if (key == "truncation_radius") {
        q.truncation_radius = number(v, key);
    } else if (key == "density") {
        s.analytic.density = density_from_string(text(v, key));
    } else if (key == "approx_ac") {
        s.analytic.approx_ac = boolean(v, key);
    } else if (key == "macro_literal_2d") {
        s.analytic.macro_literal_2d = boolean(v, key);
    } else if (key == "out") {
        cfg.out = text(v, key);
    }
}

int line_at(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

/// Line of the first occurrence of "key" in the text.
int line_of_key(std::string_view text, const std::string& key) {
    const std::size_t pos = text.find("\"" + key + "\"");
    return pos == std::string_view::npos ? 1 : line_at(text, pos);
}

InputError anchored(std::string_view source, int line, const std::string& what) {
    return InputError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        std::string what = e.what();
        if (const auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
        throw anchored(source, line_at(text, at), "malformed config: " + what);
    }
    if (!doc.is_object()) throw anchored(source, 1, "config must be a JSON object of key/value pairs");

    RunConfig cfg;
    std::set<std::string> seen_fields;
    for (const auto& [key, value] : doc.items()) {
        const std::string field = field_of(key);
        const int line = line_of_key(text, key);
        if (field.empty()) throw anchored(source, line, "unknown key '" + key + "'");
        const std::string slot = field == "modes" ? "mode" : field;
        if (!seen_fields.insert(slot).second)
            throw anchored(source, line,
                           "'" + key + "' conflicts with another form of the same field (dB and linear forms are "
                           "mutually exclusive)");
        try {
            apply_key(cfg, key, value);
        } catch (const InputError& e) {
            throw anchored(source, line, e.what());
        }
    }
    if (doc.contains("sweep_parameter") && !doc.contains("grid"))
        throw anchored(source, line_of_key(text, "sweep_parameter"), "'sweep_parameter' given without 'grid'");
    try {
        cfg.spec.base_params.validate();
        cfg.spec.base_thresholds.validate();
        cfg.spec.analytic.quad.validate();
        if (cfg.has_sweep) cfg.spec.validate();
    } catch (const InputError& e) {
        throw InputError(std::string(source) + ": " + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments) {
    for (const std::string& a : assignments) {
        const std::size_t eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--param '" + a + "': expected key=value");
        const std::string key = a.substr(0, eq);
        const std::string raw = a.substr(eq + 1);
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;
        try {
            apply_key(cfg, key, value);
        } catch (const InputError& e) {
            throw InputError("--param '" + a + "': " + e.what());
        }
    }
    try {
        cfg.spec.base_params.validate();
        cfg.spec.base_thresholds.validate();
        cfg.spec.analytic.quad.validate();
    } catch (const InputError& e) {
        throw InputError(std::string("--param: ") + e.what());
    }
}

std::string to_config_text(const SweepSpec& s) {
    const NetworkParams& p = s.base_params;
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["lambda_m"] = p.lambda_m;
    j["lambda_s"] = p.lambda_s;
    j["P_m"] = p.P_m;
    j["P_s"] = p.P_s;
    j["B_m"] = p.B_m;
    j["B_s"] = p.B_s;
    j["alpha_m"] = p.alpha_m;
    j["alpha_s"] = p.alpha_s;
    j["beta"] = p.beta;
    j["eta"] = p.eta;
    j["kappa"] = p.kappa;
    j["self_interference"] = p.self_interference == SelfInterferencePower::Pico ? "pico" : "macro";
    j["T_s"] = s.base_thresholds.T_s;
    j["T_b"] = s.base_thresholds.T_b;
    j["T_m"] = s.base_thresholds.T_m;
    std::vector<std::string> modes;
    for (DuplexMode m : s.modes) modes.emplace_back(to_string(m));
    j["modes"] = modes;
    j["sweep_parameter"] = std::string(experiments::to_string(s.swept_parameter));
    j["grid"] = s.grid;
    std::vector<std::string> outputs;
    for (experiments::Output o : s.outputs) outputs.emplace_back(experiments::to_string(o));
    j["outputs"] = outputs;
    j["mc_trials"] = s.mc_trials;
    j["seed"] = s.master_seed;
    j["window_half_width"] = s.simulation.window.half_width;
    j["wrap"] = s.simulation.window.wrap;
    j["far_field_mean"] = s.simulation.window.far_field_mean;
    j["fixed_count"] = s.simulation.fixed_count;
    j["abs_tol"] = s.analytic.quad.abs_tol;
    j["rel_tol"] = s.analytic.quad.rel_tol;
    j["max_subdivisions"] = s.analytic.quad.max_subdivisions;
    j["truncation_radius"] = s.analytic.quad.truncation_radius;
    j["density"] = std::string(analytic::to_string(s.analytic.density));
    j["approx_ac"] = s.analytic.approx_ac;
    j["macro_literal_2d"] = s.analytic.macro_literal_2d;
    j["notes"] = s.notes;
    return j.dump(2) + "\n";
}

}  // namespace hetnet::cli
