#include "platoon/presets.hpp"

namespace platoon::presets {

namespace {

struct ReferenceRow {
    double tau_s;
    double headway_s;
    double delay_s;
    double comm_delay_s;
    double alpha;
    double b;
    double c;
};

// Heterogeneous reference platoon; row 0 is the leader (no headway, gains,
// or incoming link of its own).
constexpr ReferenceRow kRows[kReferencePlatoonSize] = {
    {0.067, 0.0, 0.15, 0.00, 0.0, 0.0, 0.0},
    {0.067, 1.0, 0.30, 0.02, 7.5, 12.5, 0.0},
    {0.100, 1.0, 0.60, 0.05, 7.5, 12.5, 0.0},
    {0.200, 0.8, 0.40, 0.04, 5.0, 10.0, 1.0},
    {0.150, 0.8, 0.30, 0.03, 5.0, 10.0, 1.0},
};

const ReferenceRow& row(int index) {
    if (index < 0 || index >= kReferencePlatoonSize) {
        throw ConfigError("reference vehicle index out of range: " + std::to_string(index));
    }
    return kRows[index];
}

}  // namespace

VehicleParams reference_params(int index, double ts_s) {
    const ReferenceRow& r = row(index);
    VehicleParams p;
    p.tau_s = r.tau_s;
    p.delay_s = r.delay_s;
    p.comm_delay_s = r.comm_delay_s;
    p.headway_s = r.headway_s;
    p.standstill_gap_m = kReferenceStandstillGap;
    p.ts_s = ts_s;
    return p;
}

ControlGains reference_gains(int index) {
    if (index < 1 || index >= kReferencePlatoonSize) {
        throw ConfigError("reference gains exist for followers 1..4 only");
    }
    const ReferenceRow& r = row(index);
    return {r.alpha, r.b, r.c};
}

SpeedCouplingParams reference_pair(int index) {
    return make_coupling_params(reference_params(index), reference_params(index - 1),
                                reference_gains(index));
}

namespace {

ScenarioConfig reference_platoon_base(int vehicle_count) {
    ScenarioConfig cfg;
    cfg.sim_step_s = kReferenceSimStep;
    cfg.noise.enabled = true;
    cfg.noise.seed = 1;
    for (int i = 0; i < vehicle_count; ++i) {
        VehicleConfig v;
        v.params = reference_params(i);
        if (i > 0) v.gains = reference_gains(i);
        v.controller = i == 0 ? ControllerKind::Leader : ControllerKind::Predictor;
        cfg.vehicles.push_back(v);
    }
    return cfg;
}

ScenarioConfig fig4_scenario() {
    ScenarioConfig cfg = reference_platoon_base(kReferencePlatoonSize);
    cfg.duration_s = 60.0;
    cfg.vehicles[0].initial_speed_mps = 9.0;
    for (int i = 1; i < kReferencePlatoonSize; ++i) {
        auto& v = cfg.vehicles[static_cast<size_t>(i)];
        v.initial_speed_mps = 10.0;
        v.initial_gap_m = v.params.headway_s * 10.0 + v.params.standstill_gap_m;
    }
    cfg.vehicles[1].initial_gap_m = 9.5 + kReferenceStandstillGap;
    cfg.leader_profile = {};  // leader coasts at its initial speed
    return cfg;
}

ScenarioConfig experiment_scenario() {
    ScenarioConfig cfg = reference_platoon_base(2);
    cfg.duration_s = 40.0;
    for (auto& v : cfg.vehicles) {
        v.initial_speed_mps = 0.0;
        v.initial_gap_m = v.params.standstill_gap_m;
    }
    // ramp to the 3 m/s cruise, then one positive and one negative
    // 1.5 m/s^2 step
    cfg.leader_profile = {{1.0, 1.5},  {3.0, 0.0},  {15.0, 1.5},
                          {17.0, 0.0}, {25.0, -1.5}, {27.0, 0.0}};
    return cfg;
}

}  // namespace

ScenarioConfig scenario(const std::string& name) {
    if (name == "fig4") return fig4_scenario();
    if (name == "experiment") return experiment_scenario();
    throw ConfigError("unknown scenario preset: " + name);
}

std::vector<std::string> scenario_names() { return {"fig4", "experiment"}; }

}  // namespace platoon::presets
