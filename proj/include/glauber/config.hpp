#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glauber/dynamics.hpp"

namespace glauber {

using Json = nlohmann::json;

/// Invalid configuration. `kind` is a short machine-readable tag.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string kind, const std::string& detail)
        : std::runtime_error(detail), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

enum class ExperimentKind { exact, simulate, couple, percolation, distinguisher, frozen, fastmix,
                            scaling, hypercube };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::exact;
    Json raw;
    std::uint64_t seed = 1;
    std::size_t replicas = 1000;
    std::filesystem::path out_dir = "out";
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// {"kind": "cycle", "params": {"n": 8}} and friends; "edges" takes n and a list
/// of pairs; "square" takes a nested "base" graph spec.
GraphPtr build_graph(const Json& spec);
/// {"system": "ising", "beta": 0.5, "field": 0}, "hardcore" (lambda),
/// "coloring" (q), "cycle_block", "product_coin" (q, flip_prob).
SystemPtr build_system(GraphPtr g, const Json& spec);
/// {"kernel": "heat_bath" | "metropolis" | "flip" | "cycle_block_rule",
///  "laziness": 0, "selector": "uniform" | "tree_height" | [weights]}.
DynamicsPtr build_dynamics(SystemPtr sys, const Json& spec);

/// An explicit list, {"repeat": [..]} tiled over the sites, or "lex_least".
Configuration build_configuration(const SpinSystem& sys, const Json& spec);

/// Typed parameter access with ConfigError on missing or mistyped fields.
template <typename T>
T param(const Json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError("missing_field", std::string("missing field \"") + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("bad_field", std::string("field \"") + key + "\" has the wrong type");
    }
}

template <typename T>
T param_or(const Json& obj, const char* key, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return param<T>(obj, key);
}

}  // namespace glauber
