#include "declab/cli/config.hpp"

#include <fstream>

namespace declab::cli {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& field,
                       const std::string& message) {
    throw ConfigError(origin + ": field '" + field + "': " + message);
}

} // namespace

ExperimentConfig parse_config(const json& j, const std::string& origin) {
    if (!j.is_object()) throw ConfigError(origin + ": top level must be a JSON object");

    ExperimentConfig cfg;
    cfg.raw = j;

    if (!j.contains("experiment") || !j.at("experiment").is_string())
        fail(origin, "experiment", "required string");
    cfg.experiment = j.at("experiment").get<std::string>();

    const bool seed_ok = j.contains("seed") &&
                         (j.at("seed").is_number_unsigned() ||
                          (j.at("seed").is_number_integer() &&
                           j.at("seed").get<std::int64_t>() >= 0));
    if (!seed_ok)
        fail(origin, "seed", "required nonnegative integer (no ambient randomness)");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("time_grid")) {
        const json& tg = j.at("time_grid");
        if (!tg.is_object()) fail(origin, "time_grid", "must be an object");
        if (!tg.contains("t_start") || !tg.at("t_start").is_number())
            fail(origin, "time_grid.t_start", "required number");
        if (!tg.contains("t_end") || !tg.at("t_end").is_number())
            fail(origin, "time_grid.t_end", "required number");
        if (!tg.contains("n_steps") || !tg.at("n_steps").is_number_integer())
            fail(origin, "time_grid.n_steps", "required integer");
        cfg.time_grid.t_start = tg.at("t_start").get<double>();
        cfg.time_grid.t_end = tg.at("t_end").get<double>();
        cfg.time_grid.n_steps = tg.at("n_steps").get<int>();
        if (cfg.time_grid.n_steps < 2)
            fail(origin, "time_grid.n_steps", "must be >= 2");
        if (!(cfg.time_grid.t_end > cfg.time_grid.t_start))
            fail(origin, "time_grid.t_end", "must exceed t_start");
        cfg.has_time_grid = true;
    }

    if (j.contains("output")) {
        const json& out = j.at("output");
        if (!out.is_object() || !out.contains("dir") || !out.at("dir").is_string())
            fail(origin, "output.dir", "required string when 'output' is present");
        cfg.out_dir = out.at("dir").get<std::string>();
    }

    if (j.contains("params")) {
        if (!j.at("params").is_object()) fail(origin, "params", "must be an object");
        cfg.params = j.at("params");
    }
    if (j.contains("tolerances")) {
        if (!j.at("tolerances").is_object()) fail(origin, "tolerances", "must be an object");
        cfg.tolerances = j.at("tolerances");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": parse error at byte " + std::to_string(e.byte) + ": " +
                          e.what());
    }
    return parse_config(j, path);
}

} // namespace declab::cli
