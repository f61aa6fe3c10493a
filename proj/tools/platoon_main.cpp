#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "platoon/config_io.hpp"
#include "platoon/presets.hpp"
#include "platoon/simulation.hpp"
#include "platoon/stability.hpp"

namespace {

namespace fs = std::filesystem;
using namespace platoon;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitVerdictNegative = 3;

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("PLATOON_OUT_DIR")) return env;
    return ".";
}

std::string format_verdict_value(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

/// vehicle1..vehicle4 pick a follower of the built-in reference platoon.
int parse_vehicle_preset(const std::string& preset) {
    for (int i = 1; i < presets::kReferencePlatoonSize; ++i) {
        if (preset == "vehicle" + std::to_string(i)) return i;
    }
    throw ConfigError("unknown vehicle preset: " + preset +
                      " (expected vehicle1..vehicle4)");
}

struct SimulateOptions {
    std::string preset;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateOptions& opt) {
    ScenarioConfig cfg;
    std::string input_hash;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw ConfigError("cannot open config file: " + opt.config_path);
        std::ostringstream text;
        text << in.rdbuf();
        cfg = parse_scenario(text.str());
        input_hash = fnv1a_hex(text.str());
    } else if (!opt.preset.empty()) {
        cfg = presets::scenario(opt.preset);
        input_hash = fnv1a_hex("preset:" + opt.preset);
    } else {
        throw ConfigError("simulate needs --preset or --config");
    }
    if (opt.seed) cfg.noise.seed = *opt.seed;

    const fs::path dir = resolve_out_dir(opt.out_dir);
    fs::create_directories(dir);
    const SimOutput out = simulate(cfg);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.seed = cfg.noise.seed;
    manifest.input_hash = input_hash;
    manifest.resolved_config_json = scenario_to_json(cfg);
    manifest.outputs = write_sim_output(dir, out);
    write_manifest(dir, manifest);

    int collisions = 0;
    for (const auto& vm : out.metrics.per_vehicle) {
        collisions += vm.collision ? 1 : 0;
    }
    std::cout << "simulated: vehicles=" << cfg.vehicles.size()
              << " samples=" << out.time_s.size() << " collisions=" << collisions
              << " out=" << dir.string() << "\n";
    return collisions == 0 ? kExitOk : kExitVerdictNegative;
}

int run_vehicle_stability(const std::string& preset, double ts) {
    const int index = parse_vehicle_preset(preset);
    VehicleParams params = presets::reference_params(index, ts);
    const ControlGains gains = presets::reference_gains(index);
    params.ts_s = ts;
    const auto mags = eigenvalue_magnitudes(vehicle_stability_matrix(params, gains));
    const bool stable = mags[0] < 1.0;
    std::cout << (stable ? "vehicle-stable" : "vehicle-unstable")
              << ": max-eig=" << format_verdict_value(mags[0]) << "\n";
    return stable ? kExitOk : kExitVerdictNegative;
}

int run_string_stability(const std::string& preset, double ts) {
    const int index = parse_vehicle_preset(preset);
    SpeedCouplingParams pair = presets::reference_pair(index);
    const auto tf = tustin_speed_ratio(pair, ts);
    const double margin = string_stability_margin(tf, FrequencyGrid::standard(ts));
    const bool stable = margin <= kStringStableMargin;
    std::cout << (stable ? "string-stable" : "string-unstable")
              << ": margin=" << format_verdict_value(margin) << "\n";
    return stable ? kExitOk : kExitVerdictNegative;
}

int run_sweep_alpha_b(const std::string& preset, double ts, const Range& alpha,
                      const Range& b, const std::string& out_dir) {
    const SpeedCouplingParams base = presets::reference_pair(parse_vehicle_preset(preset));
    const MarginField field = sweep_alpha_b(base, alpha, b, ts);
    const fs::path dir = resolve_out_dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::vector<double>> cols(4);
    for (size_t i = 0; i < field.alphas.size(); ++i) {
        for (size_t j = 0; j < field.bs.size(); ++j) {
            cols[0].push_back(field.alphas[i]);
            cols[1].push_back(field.bs[j]);
            cols[2].push_back(field.margins[i * field.bs.size() + j]);
            cols[3].push_back(field.stable[i * field.bs.size() + j]);
        }
    }
    write_csv(dir / "margin_field.csv", {"alpha", "b", "margin", "stable"}, cols);
    RunManifest manifest;
    manifest.command = "sweep-alpha-b";
    manifest.input_hash = fnv1a_hex("preset:" + preset);
    manifest.outputs = {"margin_field.csv"};
    write_manifest(dir, manifest);
    const size_t stable_cells =
        static_cast<size_t>(std::count(field.stable.begin(), field.stable.end(), 1));
    std::cout << "swept: cells=" << field.margins.size() << " stable=" << stable_cells
              << " out=" << dir.string() << "\n";
    return kExitOk;
}

int run_sweep_delay(const std::string& preset, double ts, const Range& delta,
                    const std::string& out_dir) {
    const SpeedCouplingParams base = presets::reference_pair(parse_vehicle_preset(preset));
    const auto curve = sweep_delay_diff(base, delta, ts);
    const fs::path dir = resolve_out_dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::vector<double>> cols(2);
    for (const auto& [d, margin] : curve) {
        cols[0].push_back(d);
        cols[1].push_back(margin);
    }
    write_csv(dir / "delay_margin.csv", {"delay_diff_s", "margin"}, cols);
    RunManifest manifest;
    manifest.command = "sweep-delay";
    manifest.input_hash = fnv1a_hex("preset:" + preset);
    manifest.outputs = {"delay_margin.csv"};
    write_manifest(dir, manifest);
    std::cout << "swept: points=" << curve.size() << " out=" << dir.string() << "\n";
    return kExitOk;
}

int run_sweep_ts(const std::string& preset, const Range& ts, const std::string& out_dir) {
    const int index = parse_vehicle_preset(preset);
    const SamplingSweep sweep =
        sweep_sampling_period(presets::reference_params(index), presets::reference_gains(index), ts);
    const fs::path dir = resolve_out_dir(out_dir);
    fs::create_directories(dir);
    write_csv(dir / "ts_sweep.csv", {"ts_s", "max_eig"},
              {sweep.ts_values, sweep.max_eigenvalue});
    RunManifest manifest;
    manifest.command = "sweep-ts";
    manifest.input_hash = fnv1a_hex("preset:" + preset);
    manifest.outputs = {"ts_sweep.csv"};
    write_manifest(dir, manifest);
    if (sweep.threshold_s) {
        std::cout << "threshold: ts=" << format_verdict_value(*sweep.threshold_s) << "\n";
    } else {
        std::cout << "threshold: none\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampled predictor-based CACC: platoon simulation and stability analysis"};
    app.require_subcommand(1);

    SimulateOptions sim_opt;
    std::uint64_t seed_flag = 0;
    auto* sim = app.add_subcommand("simulate", "run a closed-loop platoon scenario");
    sim->add_option("--preset", sim_opt.preset, "scenario preset (fig4 | experiment)");
    sim->add_option("--config", sim_opt.config_path, "scenario JSON file");
    sim->add_option("--out", sim_opt.out_dir, "output directory");
    auto* seed_opt = sim->add_option("--seed", seed_flag, "noise seed override");

    std::string preset;
    double ts = presets::kReferenceTs;
    auto* vstab = app.add_subcommand("vehicle-stability",
                                     "eigenvalue test of the sampled closed loop");
    vstab->add_option("--preset", preset, "vehicle1..vehicle4")->required();
    vstab->add_option("--ts", ts, "sampling period (s)");

    auto* sstab = app.add_subcommand("string-stability",
                                     "sup-magnitude test of the speed-ratio transfer function");
    sstab->add_option("--preset", preset, "vehicle1..vehicle4 (link to its predecessor)")
        ->required();
    sstab->add_option("--ts", ts, "sampling period (s)");

    std::string out_dir;
    Range alpha_range{0.5, 20.0, 100};
    Range b_range{0.5, 30.0, 100};
    auto* sab = app.add_subcommand("sweep-alpha-b", "margin field over the (alpha, b) plane");
    sab->add_option("--preset", preset, "vehicle1..vehicle4")->required();
    sab->add_option("--ts", ts, "sampling period (s)");
    sab->add_option("--alpha-min", alpha_range.min);
    sab->add_option("--alpha-max", alpha_range.max);
    sab->add_option("--alpha-steps", alpha_range.steps);
    sab->add_option("--b-min", b_range.min);
    sab->add_option("--b-max", b_range.max);
    sab->add_option("--b-steps", b_range.steps);
    sab->add_option("--out", out_dir, "output directory");

    Range delta_range{-0.1, 0.5, 61};
    auto* sd = app.add_subcommand("sweep-delay", "margin versus delay difference");
    sd->add_option("--preset", preset, "vehicle1..vehicle4")->required();
    sd->add_option("--ts", ts, "sampling period (s)");
    sd->add_option("--delta-min", delta_range.min, "smallest delay difference (s)");
    sd->add_option("--delta-max", delta_range.max, "largest delay difference (s)");
    sd->add_option("--delta-steps", delta_range.steps);
    sd->add_option("--out", out_dir, "output directory");

    Range ts_range{0.01, 3.0, 300};
    auto* sts = app.add_subcommand("sweep-ts", "max eigenvalue versus sampling period");
    sts->add_option("--preset", preset, "vehicle1..vehicle4")->required();
    sts->add_option("--ts-min", ts_range.min);
    sts->add_option("--ts-max", ts_range.max);
    sts->add_option("--ts-steps", ts_range.steps);
    sts->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            if (*seed_opt) sim_opt.seed = seed_flag;
            return run_simulate(sim_opt);
        }
        if (vstab->parsed()) return run_vehicle_stability(preset, ts);
        if (sstab->parsed()) return run_string_stability(preset, ts);
        if (sab->parsed()) return run_sweep_alpha_b(preset, ts, alpha_range, b_range, out_dir);
        if (sd->parsed()) return run_sweep_delay(preset, ts, delta_range, out_dir);
        if (sts->parsed()) return run_sweep_ts(preset, ts_range, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitConfigError;
}
