#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "zt/types.hpp"

namespace zt {

/// Malformed or invalid run configuration; the CLI maps it to exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct Diagnostic {
    std::string field; ///< JSON path such as "tau_grid[3]" or "model.couplings"
    std::string message;
};

std::string to_string(const Diagnostic& d);

/// A parsed JSON run configuration.
///
/// Recognized keys: scenario, seed, out, model (inline object or file path),
/// chain, disorder, and per-scenario parameters (see README).
struct RunConfig {
    nlohmann::json raw;
    std::filesystem::path base_dir; ///< model file paths resolve against this

    std::string scenario() const;
    std::uint64_t seed() const;
    std::filesystem::path out_dir() const; ///< relative to the working directory
};

inline const std::vector<std::string> kScenarios{
    "figure2", "figure3", "efficiency-scan", "evolve", "concurrence", "crossover", "sweep"};

/// Reads a config file; syntax errors raise ConfigError citing the line.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(nlohmann::json raw, std::filesystem::path base_dir = {});

/// All problems found in `config`, without running any engine. Empty iff run()
/// gets past validation.
std::vector<Diagnostic> validate(const RunConfig& config);

struct RunReport {
    std::vector<std::filesystem::path> outputs; ///< CSV files, in write order
    std::filesystem::path manifest;
    nlohmann::json results;                      ///< scenario summary, also in the manifest
};

/// Validates, runs the scenario, writes CSVs and finally manifest.json.
/// Throws ConfigError on invalid input and zt::Error from the engines.
RunReport run(const RunConfig& config);

} // namespace zt
