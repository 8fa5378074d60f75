// Scenario runner: zeno-transport --config run.json [--scenario S] [--seed N] [--out DIR]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "zt/parallel.hpp"
#include "zt/scenario.hpp"

namespace {

constexpr int kEngineError = 1;
constexpr int kConfigError = 2;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measurement-assisted transport simulator"};
    std::string config_path;
    std::optional<std::string> scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool check_only = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--scenario", scenario, "override the config's scenario");
    app.add_option("--seed", seed, "override the config's seed");
    app.add_option("--out", out, "output directory");
    app.add_flag("--validate", check_only, "only validate the configuration");
    app.set_version_flag("--version", ZT_VERSION);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    zt::RunConfig cfg;
    try {
        cfg = zt::load_config(config_path);
    } catch (const zt::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    if (scenario) cfg.raw["scenario"] = *scenario;
    if (seed) cfg.raw["seed"] = *seed;
    if (out) cfg.raw["out"] = *out;

    const auto diags = zt::validate(cfg);
    if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << config_path << ": " << zt::to_string(d) << '\n';
        return kConfigError;
    }
    if (check_only) return 0;

    zt::configure_threads();
    try {
        const auto report = zt::run(cfg);
        for (const auto& p : report.outputs) std::cout << p.string() << '\n';
        std::cout << report.manifest.string() << '\n';
    } catch (const zt::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngineError;
    }
    return 0;
}
