#include "declab/cli/runner.hpp"

#include <cstdio>
#include <exception>

#include "declab/cli/experiments.hpp"

namespace declab::cli {

ExperimentConfig apply_overrides(ExperimentConfig cfg, const CliOverrides& ov) {
    if (ov.seed) {
        cfg.seed = *ov.seed;
        cfg.raw["seed"] = *ov.seed;
    }
    if (ov.out_dir) {
        cfg.out_dir = *ov.out_dir;
        cfg.raw["output"]["dir"] = *ov.out_dir;
    }
    if (ov.t_end) {
        if (!cfg.has_time_grid)
            throw ConfigError("--t-end given but the config has no time_grid");
        if (!(*ov.t_end > cfg.time_grid.t_start))
            throw ConfigError("--t-end must exceed time_grid.t_start");
        cfg.time_grid.t_end = *ov.t_end;
        cfg.raw["time_grid"]["t_end"] = *ov.t_end;
    }
    return cfg;
}

int run_from_file(const std::string& config_path, const CliOverrides& ov) {
    try {
        ExperimentConfig cfg = apply_overrides(load_config(config_path), ov);
        if (!experiment_exists(cfg.experiment)) {
            std::fprintf(stderr, "error: unknown experiment '%s'; did you mean '%s'?\n",
                         cfg.experiment.c_str(), suggest_experiment(cfg.experiment).c_str());
            return 1;
        }
        const RunReport report = run_experiment(cfg);
        for (const auto& c : report.checks)
            std::printf("[%s] %s value=%.6g threshold=%.6g\n", c.pass ? "PASS" : "FAIL",
                        c.name.c_str(), c.value, c.threshold);
        std::printf("%s: %s (%.0f ms, report in %s)\n", cfg.experiment.c_str(),
                    report.all_passed() ? "all checks passed" : "CHECKS FAILED",
                    report.wall_ms, cfg.out_dir.c_str());
        return report.all_passed() ? 0 : 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int list_experiments() {
    for (const auto& e : experiment_catalog())
        std::printf("%-22s %s\n", e.name.c_str(), e.description.c_str());
    return 0;
}

} // namespace declab::cli
