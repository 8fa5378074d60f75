#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "zt/scenario.hpp"

using namespace zt;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("zt_scenario_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool mentions(const std::vector<Diagnostic>& d, const std::string& field, const std::string& text) {
    for (const auto& x : d)
        if (x.field == field && x.message.find(text) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("presets validate cleanly") {
    CHECK(validate(config_from_json({{"scenario", "figure2"}})).empty());
    CHECK(validate(config_from_json({{"scenario", "figure3"}})).empty());
    CHECK(validate(config_from_json({{"scenario", "crossover"}})).empty());
}

TEST_CASE("validation diagnostics") {
    auto d = validate(config_from_json(
        {{"scenario", "efficiency-scan"}, {"chain", {{"n_sites", 2}}}, {"tau_grid", {0.0, 0.1}}}));
    CHECK(mentions(d, "tau_grid[0]", "tau must be > 0"));

    const json model = {{"n_sites", 3},
                        {"site_energies", {10, 5, 0}},
                        {"couplings", {{0, 1, 0}, {1, 0, 1}, {0, 0.5, 0}}},
                        {"trap_rates", {0, 0, 0.5}},
                        {"decay_rate", 0.001}};
    d = validate(config_from_json({{"scenario", "efficiency-scan"}, {"model", model}}));
    CHECK(mentions(d, "model.couplings", "(2,3)"));

    CHECK(mentions(validate(config_from_json({{"scenario", "nope"}})), "scenario", "unknown"));
    CHECK(mentions(validate(config_from_json({{"scenario", "evolve"}})), "model", "needs one of"));
    CHECK(mentions(validate(config_from_json({{"scenario", "evolve"},
                                              {"chain", {{"n_sites", 3}}},
                                              {"dynamics", "measurement"}})),
                   "tau", "required"));
    CHECK(mentions(validate(config_from_json({{"scenario", "concurrence"},
                                              {"chain", {{"n_sites", 3}}},
                                              {"pair", {1, 7}}})),
                   "pair", "[1, 3]"));
    CHECK(mentions(validate(config_from_json({{"scenario", "evolve"},
                                              {"model", "does/not/exist.json"}})),
                   "model", "cannot open"));
    CHECK_THROWS_AS(run(config_from_json({{"scenario", "nope"}})), ConfigError);
}

TEST_CASE("syntax errors cite the line") {
    const auto dir = scratch("syntax");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "bad.json") << "{\n  \"scenario\": \"figure2\",\n  oops\n}\n";
    CHECK_THROWS_WITH_AS(load_config(dir / "bad.json"), doctest::Contains("bad.json:3"),
                         ConfigError);
}

TEST_CASE("evolve with v = 0 shows pure exponential decay") {
    const auto dir = scratch("evolve");
    const json model = {{"n_sites", 2},
                        {"site_energies", {10, 0}},
                        {"couplings", {{0, 0}, {0, 0}}},
                        {"trap_rates", {0.25, 0}},
                        {"decay_rate", 0.1}};
    const auto report = run(config_from_json({{"scenario", "evolve"},
                                              {"model", model},
                                              {"times", {0.0, 1.0, 2.0}},
                                              {"out", dir.string()}}));
    REQUIRE(report.outputs.size() == 1);
    std::istringstream csv(slurp(report.outputs[0]));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,p_1,p_2,trace");
    for (double t : {0.0, 1.0, 2.0}) {
        std::getline(csv, line);
        double tt = 0, p1 = 0, p2 = 0, tr = 0;
        char c;
        std::istringstream(line) >> tt >> c >> p1 >> c >> p2 >> c >> tr;
        CHECK(tt == t);
        CHECK(p1 == doctest::Approx(std::exp(-2.0 * 0.35 * t)).epsilon(1e-10));
        CHECK(p2 == 0.0);
    }
    const json manifest = json::parse(slurp(report.manifest));
    CHECK(manifest.at("config").at("scenario") == "evolve");
    CHECK(manifest.contains("version"));
    CHECK(manifest.contains("wall_time_s"));
}

TEST_CASE("runs are byte-identical for a fixed seed") {
    const json base = {{"scenario", "evolve"},
                       {"chain", {{"n_sites", 3}, {"eps", 5.0}}},
                       {"dynamics", "ensemble"},
                       {"gamma", 2.0},
                       {"n_traj", 200},
                       {"seed", 17},
                       {"times", {{"t_max", 2.0}, {"points", 11}}}};
    json a = base, b = base, c = base;
    a["out"] = scratch("det_a").string();
    b["out"] = scratch("det_b").string();
    c["out"] = scratch("det_c").string();
    c["seed"] = 18;
    const auto ra = run(config_from_json(a));
    const auto rb = run(config_from_json(b));
    const auto rc = run(config_from_json(c));
    const std::string sa = slurp(ra.outputs[0]);
    CHECK(sa == slurp(rb.outputs[0]));
    CHECK(sa != slurp(rc.outputs[0]));
    CHECK(sa.rfind("t,p_1,p_2,p_3,trace,se_p_1,se_p_2,se_p_3\n", 0) == 0);
}

TEST_CASE("figure3 preset writes four curves and reports both dephasing readings") {
    const auto dir = scratch("trimer_dephasing");
    const auto report = run(config_from_json({{"scenario", "figure3"},
                                              {"times", {{"t_max", 20.0}, {"points", 201}}},
                                              {"out", dir.string()}}));
    CHECK(report.outputs.size() == 4);
    CHECK(report.outputs[2].filename() == "figure3_2gamma10.csv");
    const auto& conv = report.results.at("dephasing_conventions");
    REQUIRE(conv.size() == 3);
    CHECK(conv[1].at("C_dephase_site2").get<double>() > 0.49);
    CHECK(conv[1].at("C_dephase_all").get<double>() < 0.01);
}

TEST_CASE("crossover and sweep scenarios") {
    const auto cross = run(config_from_json({{"scenario", "crossover"},
                                             {"lengths", {1, 2}},
                                             {"out", scratch("cross").string()}}));
    const std::string text = slurp(cross.outputs[0]);
    CHECK(text.rfind("L,t_c,n_c,p_bar,p_bar_perturbative,scaling_estimate\n", 0) == 0);

    const auto sweep = run(config_from_json(
        {{"scenario", "sweep"},
         {"disorder", {{"n_sites", 3}, {"topology", "complete"}}},
         {"count", 3},
         {"eps_tau", {{"lo", 0.1}, {"hi", 10.0}, {"points", 40}}},
         {"out", scratch("sweep").string()}}));
    CHECK(sweep.results.at("model_seeds").size() == 3);
}
