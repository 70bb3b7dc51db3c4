#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "glauber/config.hpp"

namespace glauber {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct Diagnostic {
    std::string kind;
    std::string detail;
};

/// Static checks: specs build, configurations are feasible, state spaces fit
/// their caps, experiment preconditions hold. Never throws.
std::vector<Diagnostic> validate(const ExperimentConfig& cfg);

/// File name -> contents, in write order.
using OutputSet = std::map<std::string, std::string>;

/// Validates, computes every output in memory, then writes them atomically
/// together with manifest.json. Throws ConfigError for invalid configs (nothing
/// written) and other exceptions for runtime failures (manifest only).
OutputSet run_experiment(const ExperimentConfig& cfg);

/// Computes the outputs without touching the filesystem.
OutputSet compute_outputs(const ExperimentConfig& cfg);

/// Writes to a temporary sibling and renames into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string sha256_hex(const std::string& data);

/// Minimal CSV builder with fixed numeric formatting.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    CsvTable& row(std::vector<std::string> cells);
    std::string str() const;

    static std::string num(double x);
    static std::string num(std::size_t x) { return std::to_string(x); }
    static std::string num(int x) { return std::to_string(x); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace glauber
