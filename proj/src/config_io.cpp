#include "platoon/config_io.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace platoon {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    std::string unknown;
    for (const auto& item : obj.items()) {
        if (!known.count(item.key())) {
            unknown += (unknown.empty() ? "" : ", ") + item.key();
        }
    }
    if (!unknown.empty()) {
        throw ConfigError("unknown keys in " + where + ": " + unknown);
    }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ConfigError("missing required field " + where + "." + key);
    }
    if (!obj[key].is_number()) {
        throw ConfigError(where + "." + key + " must be a number");
    }
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback) {
    return obj.contains(key) ? obj[key].get<double>() : fallback;
}

double round_to_grid(double value, double ts) {
    return std::lround(value / ts) * ts;
}

ControllerKind parse_controller(const std::string& text, const std::string& where) {
    if (text == "leader") return ControllerKind::Leader;
    if (text == "predictor") return ControllerKind::Predictor;
    if (text == "nominal-with-delay") return ControllerKind::NominalWithDelay;
    throw ConfigError(where + ".controller must be one of leader | predictor | "
                      "nominal-with-delay, got: " + text);
}

const char* controller_name(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::Leader: return "leader";
        case ControllerKind::Predictor: return "predictor";
        case ControllerKind::NominalWithDelay: return "nominal-with-delay";
    }
    return "predictor";
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    reject_unknown_keys(root,
                        {"sim_step_s", "duration_s", "settle_band_mps", "saturation",
                         "noise", "leader_profile", "vehicles", "allow_delay_rounding"},
                        "config");

    ScenarioConfig cfg;
    cfg.sim_step_s = get_number(root, "sim_step_s", "config");
    cfg.duration_s = get_number(root, "duration_s", "config");
    cfg.settle_band_mps = get_number_or(root, "settle_band_mps", 0.05);
    const bool allow_rounding =
        root.contains("allow_delay_rounding") && root["allow_delay_rounding"].get<bool>();

    if (root.contains("saturation")) {
        const json& sat = root["saturation"];
        reject_unknown_keys(sat, {"enabled", "limit_mps2"}, "saturation");
        cfg.saturation_enabled = sat.value("enabled", false);
        cfg.saturation_limit_mps2 = get_number_or(sat, "limit_mps2", 5.0);
    }
    if (root.contains("noise")) {
        const json& noise = root["noise"];
        reject_unknown_keys(noise,
                            {"enabled", "seed", "gap_std_m", "speed_std_mps",
                             "accel_std_mps2", "input_std_mps2"},
                            "noise");
        cfg.noise.enabled = noise.value("enabled", false);
        cfg.noise.seed = noise.value("seed", std::uint64_t{1});
        cfg.noise.gap_std_m = get_number_or(noise, "gap_std_m", 0.01);
        cfg.noise.speed_std_mps = get_number_or(noise, "speed_std_mps", 0.01);
        cfg.noise.accel_std_mps2 = get_number_or(noise, "accel_std_mps2", 0.02);
        cfg.noise.input_std_mps2 = get_number_or(noise, "input_std_mps2", 0.02);
    }
    if (root.contains("leader_profile")) {
        for (const auto& seg : root["leader_profile"]) {
            reject_unknown_keys(seg, {"start_s", "accel_mps2"}, "leader_profile[]");
            cfg.leader_profile.push_back(
                {get_number(seg, "start_s", "leader_profile[]"),
                 get_number(seg, "accel_mps2", "leader_profile[]")});
        }
    }
    if (!root.contains("vehicles") || !root["vehicles"].is_array()) {
        throw ConfigError("config.vehicles must be an array");
    }
    int index = 0;
    for (const auto& vj : root["vehicles"]) {
        const std::string where = "vehicles[" + std::to_string(index) + "]";
        reject_unknown_keys(vj,
                            {"tau_s", "delay_s", "comm_delay_s", "headway_s",
                             "standstill_gap_m", "ts_s", "alpha", "b", "c", "controller",
                             "initial_speed_mps", "initial_gap_m", "initial_accel_mps2"},
                            where);
        VehicleConfig v;
        v.params.tau_s = get_number(vj, "tau_s", where);
        v.params.delay_s = get_number(vj, "delay_s", where);
        v.params.comm_delay_s = get_number_or(vj, "comm_delay_s", 0.0);
        v.params.headway_s = get_number_or(vj, "headway_s", 0.0);
        v.params.standstill_gap_m = get_number_or(vj, "standstill_gap_m", 0.0);
        v.params.ts_s = get_number(vj, "ts_s", where);
        v.gains.alpha = get_number_or(vj, "alpha", 0.0);
        v.gains.b = get_number_or(vj, "b", 0.0);
        v.gains.c = get_number_or(vj, "c", 0.0);
        v.controller = index == 0 ? ControllerKind::Leader : ControllerKind::Predictor;
        if (vj.contains("controller")) {
            v.controller = parse_controller(vj["controller"].get<std::string>(), where);
        }
        v.initial_speed_mps = get_number_or(vj, "initial_speed_mps", 0.0);
        v.initial_gap_m = get_number_or(vj, "initial_gap_m", 0.0);
        v.initial_accel_mps2 = get_number_or(vj, "initial_accel_mps2", 0.0);
        if (allow_rounding && v.params.ts_s > 0.0) {
            v.params.delay_s = round_to_grid(v.params.delay_s, v.params.ts_s);
            v.params.comm_delay_s = round_to_grid(v.params.comm_delay_s, v.params.ts_s);
        }
        try {
            v.params.delay_samples();
            v.params.comm_delay_samples();
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what() +
                              " (set allow_delay_rounding to round to the sample grid)");
        }
        cfg.vehicles.push_back(v);
        ++index;
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json root;
    root["sim_step_s"] = cfg.sim_step_s;
    root["duration_s"] = cfg.duration_s;
    root["settle_band_mps"] = cfg.settle_band_mps;
    root["saturation"] = {{"enabled", cfg.saturation_enabled},
                          {"limit_mps2", cfg.saturation_limit_mps2}};
    root["noise"] = {{"enabled", cfg.noise.enabled},
                     {"seed", cfg.noise.seed},
                     {"gap_std_m", cfg.noise.gap_std_m},
                     {"speed_std_mps", cfg.noise.speed_std_mps},
                     {"accel_std_mps2", cfg.noise.accel_std_mps2},
                     {"input_std_mps2", cfg.noise.input_std_mps2}};
    root["leader_profile"] = json::array();
    for (const auto& seg : cfg.leader_profile) {
        root["leader_profile"].push_back(
            {{"start_s", seg.start_s}, {"accel_mps2", seg.accel_mps2}});
    }
    root["vehicles"] = json::array();
    for (const auto& v : cfg.vehicles) {
        root["vehicles"].push_back({{"tau_s", v.params.tau_s},
                                    {"delay_s", v.params.delay_s},
                                    {"comm_delay_s", v.params.comm_delay_s},
                                    {"headway_s", v.params.headway_s},
                                    {"standstill_gap_m", v.params.standstill_gap_m},
                                    {"ts_s", v.params.ts_s},
                                    {"alpha", v.gains.alpha},
                                    {"b", v.gains.b},
                                    {"c", v.gains.c},
                                    {"controller", controller_name(v.controller)},
                                    {"initial_speed_mps", v.initial_speed_mps},
                                    {"initial_gap_m", v.initial_gap_m},
                                    {"initial_accel_mps2", v.initial_accel_mps2}});
    }
    return root.dump(2) + "\n";
}

namespace {

std::string format_value(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (columns.size() != header.size()) {
        throw std::invalid_argument("write_csv: header/column count mismatch");
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    for (size_t c = 0; c < header.size(); ++c) {
        out << (c ? "," : "") << header[c];
    }
    out << "\n";
    const size_t rows = columns.empty() ? 0 : columns.front().size();
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << format_value(columns[c][r]);
        }
        out << "\n";
    }
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV file: " + path.string());
    }
    std::vector<std::vector<double>> columns;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (header) header->push_back(cell);
            columns.emplace_back();
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        size_t c = 0;
        while (std::getline(ss, cell, ',') && c < columns.size()) {
            columns[c++].push_back(std::strtod(cell.c_str(), nullptr));
        }
    }
    return columns;
}

std::vector<std::string> write_sim_output(const std::filesystem::path& dir,
                                          const SimOutput& out) {
    const size_t n_veh = out.speed_mps.size();
    auto vehicle_headers = [&](const std::string& prefix) {
        std::vector<std::string> header{"time_s"};
        for (size_t i = 0; i < n_veh; ++i) {
            header.push_back(prefix + std::to_string(i));
        }
        return header;
    };
    auto with_time = [&](const std::vector<std::vector<double>>& series) {
        std::vector<std::vector<double>> columns{out.time_s};
        columns.insert(columns.end(), series.begin(), series.end());
        return columns;
    };
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& prefix,
                    const std::vector<std::vector<double>>& series) {
        write_csv(dir / name, vehicle_headers(prefix), with_time(series));
        written.push_back(name);
    };
    emit("speeds.csv", "v", out.speed_mps);
    emit("gaps.csv", "gap", out.gap_m);
    emit("accels.csv", "a", out.accel_mps2);
    emit("inputs_commanded.csv", "u_cmd", out.commanded_input_mps2);
    emit("inputs_applied.csv", "u_app", out.applied_input_mps2);

    std::vector<std::string> metric_header{
        "vehicle",        "l2_speed_deviation", "peak_speed_deviation_mps",
        "peak_accel_mps2", "settling_time_s",    "min_gap_m",
        "collision"};
    std::vector<std::vector<double>> metric_cols(metric_header.size());
    for (size_t i = 0; i < out.metrics.per_vehicle.size(); ++i) {
        const auto& vm = out.metrics.per_vehicle[i];
        metric_cols[0].push_back(static_cast<double>(i));
        metric_cols[1].push_back(vm.l2_speed_deviation);
        metric_cols[2].push_back(vm.peak_speed_deviation_mps);
        metric_cols[3].push_back(vm.peak_accel_mps2);
        metric_cols[4].push_back(vm.settling_time_s ? *vm.settling_time_s : -1.0);
        metric_cols[5].push_back(vm.min_gap_m);
        metric_cols[6].push_back(vm.collision ? 1.0 : 0.0);
    }
    write_csv(dir / "metrics.csv", metric_header, metric_cols);
    written.push_back("metrics.csv");
    return written;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : bytes) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
    return buf;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
    json root;
    root["tool_version"] = manifest.tool_version;
    root["command"] = manifest.command;
    root["seed"] = manifest.seed;
    root["input_hash"] = manifest.input_hash;
    if (!manifest.resolved_config_json.empty()) {
        root["resolved_config"] = json::parse(manifest.resolved_config_json);
    }
    root["outputs"] = manifest.outputs;
    std::ofstream out(dir / "manifest.json");
    if (!out) {
        throw std::runtime_error("cannot write manifest in " + dir.string());
    }
    out << root.dump(2) << "\n";
}

}  // namespace platoon
