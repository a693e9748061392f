#pragma once

// Run configuration: a flat JSON object whose keys name model fields.
// Power-like fields also accept a `_db` suffixed key (10 log10); giving both
// forms of one field is an error, as is any unknown key.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hetnet/experiments.hpp"

namespace hetnet::cli {

struct RunConfig {
    /// Base model; `sweep` carries the grid when the config defines one.
    experiments::SweepSpec spec;
    bool has_sweep = false;
    std::optional<std::string> out;
};

/// Parse config text; errors are InputError messages anchored as
/// "<source>:<line>: ...".
RunConfig parse_config(std::string_view text, std::string_view source = "config");

RunConfig load_config(const std::string& path);

/// Apply `key=value` overrides (value in JSON syntax, bare words taken as
/// strings) on top of `cfg`.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments);

/// Serialise a sweep spec in the config format; parse_config reads it back
/// unchanged.
std::string to_config_text(const experiments::SweepSpec& spec);

}  // namespace hetnet::cli
