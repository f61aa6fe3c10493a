#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/types.hpp"

namespace platoon {

/// Plant state of one vehicle. The gap is the spacing to the predecessor
/// (bumper to bumper); it may go negative, which is reported as a collision
/// but does not stop the integration. The leader's gap slot is unused and
/// held at zero.
struct VehicleState {
    double gap_m = 0.0;
    double speed_mps = 0.0;
    double accel_mps2 = 0.0;
};

/// Fixed-latency sample line. advance(x) records x and returns the input
/// from exactly `latency` advances ago; before that many advances it returns
/// the prefill value (default zero). latency 0 passes through.
class DelayLine {
public:
    explicit DelayLine(int latency_steps, double prefill = 0.0)
        : buffer_(static_cast<size_t>(latency_steps) + 1, prefill) {}

    double advance(double in) {
        buffer_[head_] = in;
        head_ = (head_ + 1) % buffer_.size();
        return buffer_[head_];
    }

    int latency() const { return static_cast<int>(buffer_.size()) - 1; }

private:
    std::vector<double> buffer_;
    size_t head_ = 0;
};

/// Piecewise-constant commanded acceleration: from `start_s` onward the
/// command is `accel_mps2`, until the next segment starts. Zero before the
/// first segment.
struct LeaderSegment {
    double start_s = 0.0;
    double accel_mps2 = 0.0;
};

double leader_command(const std::vector<LeaderSegment>& profile, double t_s);

/// Zero-mean Gaussian measurement noise, drawn independently per channel at
/// every controller sample. Off in property tests; the defaults are plausible
/// sensor scales.
struct NoiseConfig {
    bool enabled = false;
    std::uint64_t seed = 1;
    double gap_std_m = 0.01;
    double speed_std_mps = 0.01;
    double accel_std_mps2 = 0.02;
    double input_std_mps2 = 0.02;
};

enum class ControllerKind { Leader, Predictor, NominalWithDelay };

struct VehicleConfig {
    VehicleParams params;
    ControlGains gains;
    ControllerKind controller = ControllerKind::Predictor;
    double initial_speed_mps = 0.0;
    double initial_gap_m = 0.0;    ///< ignored for the leader
    double initial_accel_mps2 = 0.0;
};

struct ScenarioConfig {
    double sim_step_s = 0.001;
    double duration_s = 60.0;
    std::vector<VehicleConfig> vehicles;  ///< index 0 is the leader
    std::vector<LeaderSegment> leader_profile;
    NoiseConfig noise;
    bool saturation_enabled = false;      ///< clamp applied accel commands
    double saturation_limit_mps2 = 5.0;
    double settle_band_mps = 0.05;        ///< band for the settling-time metric

    double ts_s() const;   ///< common sampling period of all vehicles
    /// Full consistency check; throws ConfigError naming the offending field.
    void validate() const;
};

struct VehicleMetrics {
    double l2_speed_deviation = 0.0;       ///< sqrt(integral of (v - v_ref)^2 dt)
    double peak_speed_deviation_mps = 0.0;
    double peak_accel_mps2 = 0.0;
    std::optional<double> settling_time_s; ///< empty if never inside the band
    double min_gap_m = 0.0;
    bool collision = false;
};

struct Metrics {
    double reference_speed_mps = 0.0;      ///< leader speed at the final sample
    std::vector<VehicleMetrics> per_vehicle;
};

/// Time series on the simulation grid; arrays indexed [vehicle][step],
/// step count = duration / sim_step + 1.
struct SimOutput {
    std::vector<double> time_s;
    std::vector<std::vector<double>> gap_m;
    std::vector<std::vector<double>> speed_mps;
    std::vector<std::vector<double>> accel_mps2;
    std::vector<std::vector<double>> commanded_input_mps2;
    std::vector<std::vector<double>> applied_input_mps2;
    Metrics metrics;
};

/// Exact zero-order-hold step of one vehicle over dt with the applied input
/// and the predecessor speed both held constant. The speed/acceleration
/// update is the exact solution of the lag dynamics; the gap update uses the
/// exact ego displacement against prev_speed * dt.
VehicleState exact_zoh_step(const VehicleState& state, double prev_speed_mps,
                            double applied_input_mps2, double tau_s, double dt_s);

/// Exact ego displacement over one held-input step (the integral of the
/// closed-form speed trajectory).
double zoh_displacement(double speed_mps, double accel_mps2, double applied_input_mps2,
                        double tau_s, double dt_s);

/// Runs the multirate closed-loop simulation: plants advance exactly every
/// sim_step; controllers sample, with noise and communication delays, every
/// ts. Deterministic for a fixed configuration and seed.
///
/// Gap coupling uses each predecessor's exact displacement over the step, so
/// trajectories are independent of sim_step up to rounding. Communication
/// lines for speed/acceleration are prefilled with the initial signal values
/// (the platoon is assumed to hold its initial state before t = 0); all input
/// channels and histories are prefilled with zero.
SimOutput simulate(const ScenarioConfig& cfg);

/// Recomputes the metrics block from a finished run.
Metrics compute_metrics(const SimOutput& out, const ScenarioConfig& cfg);

}  // namespace platoon
