// report.hpp — Run reports: every scientific check of a run appears exactly
// once, alongside numeric summaries, timings, and the exact config used.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "declab/cli/config.hpp"

namespace declab::cli {

struct Check {
    std::string name;
    bool pass{false};
    double value{0.0};
    double threshold{0.0};
    std::string detail;
};

struct RunReport {
    std::string experiment;
    json config_echo;
    std::vector<Check> checks;
    json summary = json::object();
    std::vector<std::string> artifacts;
    double wall_ms{0.0};

    void add_check(const std::string& name, bool pass, double value, double threshold,
                   const std::string& detail = "") {
        checks.push_back({name, pass, value, threshold, detail});
    }

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    json to_json() const;
    void write(const std::string& path) const;
};

} // namespace declab::cli
