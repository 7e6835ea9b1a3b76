// runner.hpp — File-to-exit-code wrapper around the experiment registry.
// Exit codes: 0 all checks passed, 1 config or runtime error, 2 at least one
// scientific check failed.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "declab/cli/config.hpp"
#include "declab/cli/report.hpp"

namespace declab::cli {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> t_end;
};

ExperimentConfig apply_overrides(ExperimentConfig cfg, const CliOverrides& ov);

int run_from_file(const std::string& config_path, const CliOverrides& ov);

int list_experiments();

} // namespace declab::cli
