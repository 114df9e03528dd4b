#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irrev/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Irreversibility measures for open quantum systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "report.json";
    irrev::RunOptions options;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "Execute a scenario config and write a report");
    run->add_option("config", config_path, "Scenario config file (JSON)")->required();
    run->add_option("--out", out_path, "Report output path");
    run->add_option("--set", options.overrides, "Override a config entry (dotted.path=value)");
    auto* seed_opt = run->add_option("--seed", seed, "Override the sampling seed");
    run->add_flag("--quiet", options.quiet, "Suppress progress output");

    auto* validate = app.add_subcommand("validate", "Validate a scenario config only");
    validate->add_option("config", config_path, "Scenario config file (JSON)")->required();
    validate->add_option("--set", options.overrides, "Override a config entry");
    validate->add_flag("--quiet", options.quiet, "Suppress output");

    CLI11_PARSE(app, argc, argv);

    if (seed_opt->count() > 0) options.seed = seed;

    if (run->parsed()) {
        return irrev::run_scenario(config_path, out_path, options, std::cerr);
    }
    return irrev::validate_scenario(config_path, options, std::cerr);
}
