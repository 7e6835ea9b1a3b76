// declab — experiment runner for the decoherence laboratory.
//
//   declab list
//   declab run <config.json> [--seed N] [--out DIR] [--t-end X]

#include <CLI11.hpp>

#include <cstdint>
#include <string>

#include "declab/cli/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"declab — decoherence dynamics experiments"};
    app.require_subcommand(0, 1);

    auto* list_cmd = app.add_subcommand("list", "list available experiments");

    std::string config_path;
    declab::cli::CliOverrides overrides;
    std::uint64_t seed_value = 0;
    std::string out_value;
    double t_end_value = 0.0;

    auto* run_cmd = app.add_subcommand("run", "run one experiment from a config file");
    run_cmd->add_option("config", config_path, "JSON experiment config")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed_value, "override the config seed");
    auto* out_opt = run_cmd->add_option("--out", out_value, "override the output directory");
    auto* tend_opt = run_cmd->add_option("--t-end", t_end_value, "override time_grid.t_end");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        if (*seed_opt) overrides.seed = seed_value;
        if (*out_opt) overrides.out_dir = out_value;
        if (*tend_opt) overrides.t_end = t_end_value;
        return declab::cli::run_from_file(config_path, overrides);
    }
    // Bare invocation and `list` both print the catalog.
    (void)list_cmd;
    return declab::cli::list_experiments();
}
