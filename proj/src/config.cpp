#include "glauber/config.hpp"

#include <fstream>
#include <sstream>

#include "glauber/fastmix.hpp"

namespace glauber {

namespace {

constexpr ExperimentKind kAllKinds[] = {
    ExperimentKind::exact,      ExperimentKind::simulate,      ExperimentKind::couple,
    ExperimentKind::percolation, ExperimentKind::distinguisher, ExperimentKind::frozen,
    ExperimentKind::fastmix,    ExperimentKind::scaling,       ExperimentKind::hypercube};

std::size_t positive_size(const Json& obj, const char* key) {
    auto v = param<long long>(obj, key);
    if (v <= 0) throw ConfigError("bad_field", std::string("field \"") + key + "\" must be positive");
    return std::size_t(v);
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::exact: return "exact";
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::couple: return "couple";
    case ExperimentKind::percolation: return "percolation";
    case ExperimentKind::distinguisher: return "distinguisher";
    case ExperimentKind::frozen: return "frozen";
    case ExperimentKind::fastmix: return "fastmix";
    case ExperimentKind::scaling: return "scaling";
    case ExperimentKind::hypercube: return "hypercube";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    for (auto k : kAllKinds)
        if (to_string(k) == s) return k;
    throw ConfigError("unknown_experiment", "unknown experiment kind \"" + s + "\"");
}

ExperimentConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("malformed_json", e.what());
    }
    if (!j.is_object()) throw ConfigError("malformed_json", "top level must be an object");
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.kind = experiment_kind_from_string(param<std::string>(j, "experiment"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer())
            throw ConfigError("bad_field", "field \"seed\" must be an integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("replicas")) cfg.replicas = positive_size(j, "replicas");
    if (j.contains("out")) cfg.out_dir = param<std::string>(j, "out");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("io", "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

GraphPtr build_graph(const Json& spec) {
    if (!spec.is_object()) throw ConfigError("bad_graph", "graph spec must be an object");
    const auto kind = param<std::string>(spec, "kind");
    const Json params = spec.contains("params") ? spec["params"] : spec;
    try {
        if (kind == "empty") return empty_graph(positive_size(params, "n"));
        if (kind == "path") return path_graph(positive_size(params, "n"));
        if (kind == "cycle") return cycle_graph(positive_size(params, "n"));
        if (kind == "complete") return complete_graph(positive_size(params, "n"));
        if (kind == "grid")
            return grid_graph(positive_size(params, "rows"), positive_size(params, "cols"));
        if (kind == "tree")
            return tree_graph(positive_size(params, "branching"),
                              std::size_t(param<long long>(params, "height")));
        if (kind == "edges") {
            auto pairs = param<std::vector<std::pair<Vertex, Vertex>>>(params, "edges");
            return edge_list_graph(positive_size(params, "n"), pairs);
        }
        if (kind == "square") return graph_square(build_graph(param<Json>(params, "base")));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError("bad_graph", e.what());
    }
    throw ConfigError("bad_graph", "unknown graph kind \"" + kind + "\"");
}

SystemPtr build_system(GraphPtr g, const Json& spec) {
    if (!spec.is_object()) throw ConfigError("bad_system", "system spec must be an object");
    const auto name = param<std::string>(spec, "system");
    try {
        if (name == "ising")
            return make_ising(g, IsingParams{param_or(spec, "beta", 0.0), param_or(spec, "field", 0.0)});
        if (name == "hardcore") return make_hardcore(g, HardCoreParams{param_or(spec, "lambda", 1.0)});
        if (name == "coloring") return make_coloring(g, ColoringParams{param<int>(spec, "q")});
        if (name == "cycle_block") return make_cycle_block(g);
        if (name == "product_coin")
            return make_product_coin(g, ProductCoinParams{param_or(spec, "q", 2),
                                                          param_or(spec, "flip_prob", 0.5)});
    } catch (const ConfigError&) {
        throw;
    } catch (const EmptyFeasibleSet& e) {
        throw ConfigError("empty_feasible_set", e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("bad_system", e.what());
    }
    throw ConfigError("bad_system", "unknown system \"" + name + "\"");
}

DynamicsPtr build_dynamics(SystemPtr sys, const Json& spec) {
    const Json s = spec.is_object() ? spec : Json::object();
    const auto kernel_name = param_or<std::string>(s, "kernel", "heat_bath");
    const double laziness = param_or(s, "laziness", 0.0);
    try {
        KernelPtr k;
        if (kernel_name == "heat_bath") k = heat_bath_kernel(sys);
        else if (kernel_name == "metropolis") k = metropolis_kernel(sys);
        else if (kernel_name == "flip") {
            const auto* pc = product_coin_params(*sys);
            k = flip_kernel(sys, param_or(s, "flip_prob", pc ? pc->flip_prob : 0.5));
        } else if (kernel_name == "cycle_block_rule") k = cycle_block_rule_kernel(sys);
        else throw ConfigError("bad_dynamics", "unknown kernel \"" + kernel_name + "\"");

        const std::size_t n = sys->site_count();
        Json sel = s.contains("selector") ? s["selector"] : Json("uniform");
        if (sel.is_object()) {
            if (sel.contains("weights")) sel = sel["weights"];
            else sel = param<std::string>(sel, "kind");
        }
        if (sel == "uniform")
            return std::make_shared<const Dynamics>(k, SiteSelector::uniform(n), laziness);
        if (sel == "tree_height")
            return std::make_shared<const Dynamics>(k, nonuniform_tree_selector(sys->graph()), laziness);
        if (!sel.is_array()) throw ConfigError("bad_dynamics", "unknown selector");
        auto w = sel.get<std::vector<double>>();
        if (w.size() != n) throw ConfigError("bad_dynamics", "selector needs one weight per site");
        return std::make_shared<const Dynamics>(k, SiteSelector(std::move(w)), laziness);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError("bad_dynamics", e.what());
    }
}

Configuration build_configuration(const SpinSystem& sys, const Json& spec) {
    const std::size_t n = sys.site_count();
    Configuration c;
    if (spec.is_string() && spec == "lex_least") {
        auto r = find_feasible(sys, Configuration(n, kUnassigned));
        if (r.status != SearchStatus::found)
            throw ConfigError("empty_feasible_set", "empty feasible set: " + sys.describe());
        return r.config;
    }
    std::vector<int> values;
    if (spec.is_array()) {
        values = spec.get<std::vector<int>>();
        if (values.size() != n) throw ConfigError("bad_configuration", "configuration length mismatch");
    } else if (spec.is_object() && spec.contains("repeat")) {
        auto pat = param<std::vector<int>>(spec, "repeat");
        if (pat.empty()) throw ConfigError("bad_configuration", "empty repeat pattern");
        for (std::size_t i = 0; i < n; ++i) values.push_back(pat[i % pat.size()]);
    } else {
        throw ConfigError("bad_configuration", "configuration must be a list, {\"repeat\": [...]} or \"lex_least\"");
    }
    for (int v : values) {
        if (v < 0 || v >= sys.num_spins())
            throw ConfigError("bad_configuration", "spin " + std::to_string(v) + " out of range");
        c.push_back(Spin(v));
    }
    if (!sys.is_feasible(c))
        throw ConfigError("infeasible_configuration", "configuration " + format_configuration(c) +
                                                          " is infeasible");
    return c;
}

}  // namespace glauber
