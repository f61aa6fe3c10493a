#pragma once

#include <vector>

#include "platoon/state_matrices.hpp"
#include "platoon/types.hpp"

namespace platoon {

/// One controller sample of the measured state, ordered like the coupled
/// state vector. The predecessor channels are the values received over V2V,
/// i.e. already delayed by the communication latency.
struct Measurement {
    double gap_error_m = 0.0;       ///< measured gap minus standstill gap
    double speed_mps = 0.0;         ///< ego speed
    double prev_speed_mps = 0.0;    ///< predecessor speed (comm-delayed)
    double accel_mps2 = 0.0;        ///< ego acceleration
    double prev_accel_mps2 = 0.0;   ///< predecessor acceleration (comm-delayed)

    Vec5 as_vector() const {
        Vec5 x;
        x << gap_error_m, speed_mps, prev_speed_mps, accel_mps2, prev_accel_mps2;
        return x;
    }
};

/// Fixed-length history of past control samples, newest first.
/// operator[](age) returns the sample pushed `age` calls ago, age = 1..size.
class InputHistory {
public:
    explicit InputHistory(int length)
        : samples_(static_cast<size_t>(length), 0.0) {}

    void push(double value) {
        if (samples_.empty()) return;
        head_ = (head_ + samples_.size() - 1) % samples_.size();
        samples_[head_] = value;
    }

    double operator[](int age) const {
        return samples_[(head_ + static_cast<size_t>(age) - 1) % samples_.size()];
    }

    int size() const { return static_cast<int>(samples_.size()); }

private:
    std::vector<double> samples_;
    size_t head_ = 0;
};

/// Precomputed matrices and input histories for the sampled delay-compensating
/// control law of one follower.
///
/// The predicted state is
///   q_k = T_delay x_k + sum_{j=1..l} W_j B_ego u_{k-j}
///       + T_gap sum_{j=1..l_prev} W_j B_prev up_{k-j},
/// where T_delay is the transition over the ego actuation delay, T_gap the
/// transition over the delay difference to the predecessor, and
/// W_j = transition(j ts) * hold_integral(ts) weights each past held input.
struct PredictorContext {
    Mat5 delay_transition;             ///< transition over the ego delay
    Mat5 delay_gap_transition;         ///< transition over (ego - predecessor) delay
    std::vector<Mat5> input_weights;   ///< W_j, j = 1..max(l, l_prev)
    Vec5 own_input_map;
    Vec5 prev_input_map;
    InputHistory own_history{0};       ///< own commands u_{k-1}..u_{k-l}
    InputHistory prev_history{0};      ///< received predecessor commands, l_prev deep
};

/// Delay-free spacing/speed/acceleration feedback law. Returns the commanded
/// acceleration before the driveline lag.
double nominal_control(const Measurement& x, const VehicleParams& p, const ControlGains& g);

/// Precomputes the matrices for the (ego, predecessor) pair and zero-fills
/// the input histories. Both vehicles must share the sampling period and
/// have delays on the sample grid; violations raise ConfigError.
PredictorContext build_context(const VehicleParams& ego, const VehicleParams& prev);

/// Evaluates the predicted coupled state for the current measurement without
/// mutating the histories.
Vec5 predictor_state(const Measurement& x, const PredictorContext& ctx);

/// One controller sample: predicts the state, evaluates the feedback law on
/// the prediction, then records the new command and the received predecessor
/// command. Must be called once per sample, in time order; the current
/// command never enters its own prediction sum.
double control_step(const Measurement& x, double prev_input_mps2, PredictorContext& ctx,
                    const VehicleParams& p, const ControlGains& g);

}  // namespace platoon
