// experiments.hpp — Registry and entry points of the shipped experiments.

#pragma once

#include <string>
#include <vector>

#include "declab/cli/config.hpp"
#include "declab/cli/report.hpp"

namespace declab::cli {

struct ExperimentInfo {
    std::string name;
    std::string description;
};

const std::vector<ExperimentInfo>& experiment_catalog();

bool experiment_exists(const std::string& name);

// Closest catalog name by edit distance, for error messages.
std::string suggest_experiment(const std::string& name);

// Dispatch on cfg.experiment; writes CSV artifacts and the JSON report under
// cfg.out_dir and returns the report.
RunReport run_experiment(const ExperimentConfig& cfg);

} // namespace declab::cli
