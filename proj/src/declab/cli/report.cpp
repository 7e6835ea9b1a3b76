#include "declab/cli/report.hpp"

#include <fstream>

#include "declab/errors.hpp"

namespace declab::cli {

json RunReport::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["config"] = config_echo;
    json jc = json::array();
    for (const auto& c : checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["value"] = c.value;
        e["threshold"] = c.threshold;
        if (!c.detail.empty()) e["detail"] = c.detail;
        jc.push_back(e);
    }
    j["checks"] = jc;
    j["all_passed"] = all_passed();
    j["summary"] = summary;
    j["artifacts"] = artifacts;
    j["wall_ms"] = wall_ms;
    return j;
}

void RunReport::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("RunReport: cannot open " + path);
    out << to_json().dump(2) << '\n';
}

} // namespace declab::cli
