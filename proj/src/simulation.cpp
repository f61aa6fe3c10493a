#include "platoon/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace platoon {

double leader_command(const std::vector<LeaderSegment>& profile, double t_s) {
    double u = 0.0;
    for (const auto& seg : profile) {
        if (t_s + 1e-12 < seg.start_s) break;
        u = seg.accel_mps2;
    }
    return u;
}

double ScenarioConfig::ts_s() const {
    if (vehicles.empty()) {
        throw ConfigError("scenario has no vehicles");
    }
    return vehicles.front().params.ts_s;
}

namespace {

int exact_ratio(double numer, double denom, const std::string& what) {
    const double ratio = numer / denom;
    const int n = static_cast<int>(std::lround(ratio));
    if (n <= 0 || std::abs(ratio - n) > 1e-6 * std::max(1.0, std::abs(ratio))) {
        throw ConfigError(what + ": " + std::to_string(numer) +
                          " is not a whole multiple of " + std::to_string(denom));
    }
    return n;
}

int latency_steps(double interval_s, double dt, const std::string& what) {
    if (interval_s == 0.0) return 0;
    return exact_ratio(interval_s, dt, what);
}

}  // namespace

void ScenarioConfig::validate() const {
    if (vehicles.size() < 2) {
        throw ConfigError("scenario needs a leader and at least one follower");
    }
    if (!(sim_step_s > 0.0)) {
        throw ConfigError("sim_step_s must be positive");
    }
    if (!(duration_s > 0.0)) {
        throw ConfigError("duration_s must be positive");
    }
    const double ts = vehicles.front().params.ts_s;
    if (!(ts > 0.0)) {
        throw ConfigError("ts_s must be positive");
    }
    exact_ratio(ts, sim_step_s, "ts_s / sim_step_s");
    for (size_t i = 0; i < vehicles.size(); ++i) {
        const auto& v = vehicles[i];
        const std::string tag = "vehicle " + std::to_string(i);
        if (v.params.ts_s != ts) {
            throw ConfigError(tag + ": ts_s differs from the platoon sampling period");
        }
        if (!(v.params.tau_s > 0.0)) {
            throw ConfigError(tag + ": tau_s must be positive");
        }
        if (v.params.delay_s < 0.0 || v.params.comm_delay_s < 0.0) {
            throw ConfigError(tag + ": delays must be non-negative");
        }
        v.params.delay_samples();  // throws if off the sample grid
        if (i == 0) continue;
        v.params.comm_delay_samples();
        if (!(v.params.headway_s > 0.0)) {
            throw ConfigError(tag + ": headway_s must be positive");
        }
        if (!(v.params.standstill_gap_m > 0.0)) {
            throw ConfigError(tag + ": standstill_gap_m must be positive");
        }
        if (v.controller == ControllerKind::Leader) {
            throw ConfigError(tag + ": only vehicle 0 may be the leader");
        }
        if (!(v.gains.alpha > 0.0) || !(v.gains.b > 0.0) || v.gains.c < 0.0) {
            throw ConfigError(tag + ": gains must satisfy alpha > 0, b > 0, c >= 0");
        }
    }
    double prev_start = -std::numeric_limits<double>::infinity();
    for (const auto& seg : leader_profile) {
        if (seg.start_s < prev_start) {
            throw ConfigError("leader_profile segment times must be non-decreasing");
        }
        prev_start = seg.start_s;
    }
}

double zoh_displacement(double speed_mps, double accel_mps2, double applied_input_mps2,
                        double tau_s, double dt_s) {
    const double decay = 1.0 - std::exp(-dt_s / tau_s);
    return speed_mps * dt_s + accel_mps2 * tau_s * (dt_s - tau_s * decay) +
           applied_input_mps2 * (dt_s * dt_s / 2.0 - tau_s * dt_s + tau_s * tau_s * decay);
}

VehicleState exact_zoh_step(const VehicleState& state, double prev_speed_mps,
                            double applied_input_mps2, double tau_s, double dt_s) {
    const double decay = 1.0 - std::exp(-dt_s / tau_s);
    VehicleState next;
    next.accel_mps2 = state.accel_mps2 * (1.0 - decay) + applied_input_mps2 * decay;
    next.speed_mps = state.speed_mps + state.accel_mps2 * tau_s * decay +
                     applied_input_mps2 * (dt_s - tau_s * decay);
    next.gap_m = state.gap_m + prev_speed_mps * dt_s -
                 zoh_displacement(state.speed_mps, state.accel_mps2, applied_input_mps2,
                                  tau_s, dt_s);
    return next;
}

SimOutput simulate(const ScenarioConfig& cfg) {
    cfg.validate();
    const size_t n_veh = cfg.vehicles.size();
    const double dt = cfg.sim_step_s;
    const int ratio = exact_ratio(cfg.ts_s(), dt, "ts_s / sim_step_s");
    const int steps = exact_ratio(cfg.duration_s, dt, "duration_s / sim_step_s");

    std::mt19937_64 rng(cfg.noise.seed);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    auto draw_noise = [&](double std_dev) {
        return cfg.noise.enabled ? std_dev * unit_normal(rng) : 0.0;
    };

    std::vector<VehicleState> state(n_veh);
    std::vector<PredictorContext> ctx;
    ctx.reserve(n_veh);
    std::vector<DelayLine> actuation;
    std::vector<DelayLine> comm_speed, comm_accel, comm_input;
    for (size_t i = 0; i < n_veh; ++i) {
        const auto& v = cfg.vehicles[i];
        state[i] = {i == 0 ? 0.0 : v.initial_gap_m, v.initial_speed_mps, v.initial_accel_mps2};
        actuation.emplace_back(latency_steps(v.params.delay_s, dt, "delay_s / sim_step_s"));
        if (i == 0) {
            ctx.emplace_back();
            comm_speed.emplace_back(0);
            comm_accel.emplace_back(0);
            comm_input.emplace_back(0);
            continue;
        }
        ctx.push_back(build_context(v.params, cfg.vehicles[i - 1].params));
        const int comm_lat = latency_steps(v.params.comm_delay_s, dt, "comm_delay_s / sim_step_s");
        comm_speed.emplace_back(comm_lat, cfg.vehicles[i - 1].initial_speed_mps);
        comm_accel.emplace_back(comm_lat, cfg.vehicles[i - 1].initial_accel_mps2);
        comm_input.emplace_back(comm_lat, 0.0);
    }

    SimOutput out;
    out.time_s.resize(static_cast<size_t>(steps) + 1);
    auto series = [&] {
        return std::vector<std::vector<double>>(
            n_veh, std::vector<double>(static_cast<size_t>(steps) + 1, 0.0));
    };
    out.gap_m = series();
    out.speed_mps = series();
    out.accel_mps2 = series();
    out.commanded_input_mps2 = series();
    out.applied_input_mps2 = series();

    std::vector<double> command(n_veh, 0.0);
    std::vector<double> seen_speed(n_veh, 0.0), seen_accel(n_veh, 0.0), seen_input(n_veh, 0.0);
    std::vector<double> displacement(n_veh, 0.0);

    for (int n = 0; n <= steps; ++n) {
        const double t = n * dt;
        out.time_s[static_cast<size_t>(n)] = t;
        const bool control_instant = n % ratio == 0;
        for (size_t i = 0; i < n_veh; ++i) {
            const auto& v = cfg.vehicles[i];
            if (control_instant) {
                if (i == 0) {
                    command[0] = leader_command(cfg.leader_profile, t);
                } else {
                    Measurement meas;
                    meas.gap_error_m = state[i].gap_m - v.params.standstill_gap_m +
                                       draw_noise(cfg.noise.gap_std_m);
                    meas.speed_mps = state[i].speed_mps + draw_noise(cfg.noise.speed_std_mps);
                    meas.prev_speed_mps = seen_speed[i] + draw_noise(cfg.noise.speed_std_mps);
                    meas.accel_mps2 = state[i].accel_mps2 + draw_noise(cfg.noise.accel_std_mps2);
                    meas.prev_accel_mps2 = seen_accel[i] + draw_noise(cfg.noise.accel_std_mps2);
                    const double received_input =
                        seen_input[i] + draw_noise(cfg.noise.input_std_mps2);
                    command[i] = v.controller == ControllerKind::Predictor
                                     ? control_step(meas, received_input, ctx[i], v.params,
                                                    v.gains)
                                     : nominal_control(meas, v.params, v.gains);
                    if (cfg.saturation_enabled) {
                        command[i] = std::clamp(command[i], -cfg.saturation_limit_mps2,
                                                cfg.saturation_limit_mps2);
                    }
                }
            }
            // broadcast the state and the command active at t to the follower
            if (i + 1 < n_veh) {
                seen_speed[i + 1] = comm_speed[i + 1].advance(state[i].speed_mps);
                seen_accel[i + 1] = comm_accel[i + 1].advance(state[i].accel_mps2);
                seen_input[i + 1] = comm_input[i + 1].advance(command[i]);
            }
            out.gap_m[i][static_cast<size_t>(n)] = state[i].gap_m;
            out.speed_mps[i][static_cast<size_t>(n)] = state[i].speed_mps;
            out.accel_mps2[i][static_cast<size_t>(n)] = state[i].accel_mps2;
            out.commanded_input_mps2[i][static_cast<size_t>(n)] = command[i];
            const double applied = actuation[i].advance(command[i]);
            out.applied_input_mps2[i][static_cast<size_t>(n)] = applied;
            if (n == steps) continue;
            displacement[i] =
                zoh_displacement(state[i].speed_mps, state[i].accel_mps2, applied,
                                 v.params.tau_s, dt);
            VehicleState next = exact_zoh_step(state[i], 0.0, applied, v.params.tau_s, dt);
            next.gap_m = i == 0 ? 0.0
                                : state[i].gap_m + displacement[i - 1] - displacement[i];
            state[i] = next;
        }
    }
    out.metrics = compute_metrics(out, cfg);
    return out;
}

Metrics compute_metrics(const SimOutput& out, const ScenarioConfig& cfg) {
    Metrics m;
    const size_t n_veh = out.speed_mps.size();
    const size_t n_samples = out.time_s.size();
    const double dt = cfg.sim_step_s;
    m.reference_speed_mps = out.speed_mps[0].back();
    m.per_vehicle.resize(n_veh);
    for (size_t i = 0; i < n_veh; ++i) {
        auto& vm = m.per_vehicle[i];
        double sum_sq = 0.0;
        vm.min_gap_m = std::numeric_limits<double>::infinity();
        std::optional<double> settled;
        for (size_t n = 0; n < n_samples; ++n) {
            const double dev = out.speed_mps[i][n] - m.reference_speed_mps;
            sum_sq += dev * dev;
            vm.peak_speed_deviation_mps = std::max(vm.peak_speed_deviation_mps, std::abs(dev));
            vm.peak_accel_mps2 = std::max(vm.peak_accel_mps2, std::abs(out.accel_mps2[i][n]));
            if (std::abs(dev) <= cfg.settle_band_mps) {
                if (!settled) settled = out.time_s[n];
            } else {
                settled.reset();
            }
            if (i > 0) {
                vm.min_gap_m = std::min(vm.min_gap_m, out.gap_m[i][n]);
            }
        }
        vm.l2_speed_deviation = std::sqrt(sum_sq * dt);
        vm.settling_time_s = settled;
        if (i == 0) vm.min_gap_m = 0.0;
        vm.collision = i > 0 && vm.min_gap_m <= 0.0;
    }
    return m;
}

}  // namespace platoon
