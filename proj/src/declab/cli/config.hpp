// config.hpp — Experiment configuration: JSON file with a schema validator.
// One file describes one experiment run; the seed is mandatory so no run
// depends on ambient randomness.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "declab/errors.hpp"

namespace declab::cli {

using json = nlohmann::json;

struct ConfigError : Error {
    using Error::Error;
};

struct TimeGrid {
    double t_start{0.0};
    double t_end{1.0};
    int n_steps{2}; // number of sample points, endpoints included

    std::vector<double> points() const {
        std::vector<double> t(static_cast<std::size_t>(n_steps));
        const double dt = (t_end - t_start) / static_cast<double>(n_steps - 1);
        for (int k = 0; k < n_steps; ++k) t[static_cast<std::size_t>(k)] = t_start + k * dt;
        return t;
    }
};

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed{0};
    TimeGrid time_grid;
    bool has_time_grid{false};
    std::string out_dir{"out"};
    json params = json::object();
    json tolerances = json::object();
    json raw = json::object(); // exact content echoed into reports

    double tolerance(const std::string& name, double fallback) const {
        if (tolerances.contains(name)) return tolerances.at(name).get<double>();
        return fallback;
    }
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const json& j, const std::string& origin);

} // namespace declab::cli
