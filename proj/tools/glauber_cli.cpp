#include <CLI11.hpp>

#include <iostream>

#include "glauber/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string quoted(std::string s) {
    for (auto& c : s)
        if (c == '"' || c == '\n') c = '\'';
    return "\"" + s + "\"";
}

void report(const std::string& kind, const std::string& detail) {
    std::cerr << "glauber: error kind=" << kind << " detail=" << quoted(detail) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Glauber dynamics experiment runner"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    for (auto* sub : {app.add_subcommand("run", "Validate and run an experiment"),
                      app.add_subcommand("validate", "Validate a config without running it")}) {
        sub->add_option("--config", config_path, "Experiment JSON file")->required();
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--out", out_dir, "Override the output directory");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report("usage", e.what());
        return kExitConfig;
    }
    const bool run = app.got_subcommand("run");

    glauber::ExperimentConfig cfg;
    try {
        cfg = glauber::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.out_dir = *out_dir;
    } catch (const glauber::ConfigError& e) {
        report(e.kind(), e.what());
        return kExitConfig;
    }

    if (!run) {
        auto diags = glauber::validate(cfg);
        for (const auto& d : diags) report(d.kind, d.detail);
        if (diags.empty()) std::cout << "glauber: ok experiment=" << glauber::to_string(cfg.kind) << "\n";
        return diags.empty() ? kExitOk : kExitConfig;
    }
    try {
        auto outputs = glauber::run_experiment(cfg);
        for (const auto& [name, body] : outputs) std::cout << (cfg.out_dir / name).string() << "\n";
        return kExitOk;
    } catch (const glauber::ConfigError& e) {
        report(e.kind(), e.what());
        return kExitConfig;
    } catch (const glauber::CapExceeded& e) {
        report("cap_exceeded", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        report("runtime", e.what());
        return kExitRuntime;
    }
}
