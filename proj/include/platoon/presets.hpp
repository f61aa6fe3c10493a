#pragma once

#include <string>
#include <vector>

#include "platoon/simulation.hpp"
#include "platoon/stability.hpp"
#include "platoon/types.hpp"

namespace platoon::presets {

/// Number of vehicles in the built-in reference platoon (leader + 4
/// followers with distinct lags and actuation delays).
inline constexpr int kReferencePlatoonSize = 5;

/// Default sampling period and plant step of the reference configuration.
inline constexpr double kReferenceTs = 0.01;
inline constexpr double kReferenceSimStep = 0.001;
inline constexpr double kReferenceStandstillGap = 10.0;

/// Parameters of vehicle `index` (0 = leader) of the reference platoon.
VehicleParams reference_params(int index, double ts_s = kReferenceTs);

/// Gains of follower `index` (1..4). The leader carries no gains.
ControlGains reference_gains(int index);

/// Coupling parameters of the link ending at follower `index` (1..4).
SpeedCouplingParams reference_pair(int index);

/// Named scenario presets:
///   "fig4"       five-vehicle convergence run: followers start 1 m/s above
///                the coasting leader, the first gap 0.5 m short of its
///                equilibrium value; measurement noise on.
///   "experiment" two-vehicle run from standstill: the leader ramps to a
///                3 m/s cruise, then applies +1.5 and -1.5 m/s^2 steps;
///                20 ms communication latency; measurement noise on.
ScenarioConfig scenario(const std::string& name);

std::vector<std::string> scenario_names();

}  // namespace platoon::presets
