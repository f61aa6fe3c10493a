#include "platoon/controller.hpp"

#include <cmath>

namespace platoon {

double nominal_control(const Measurement& x, const VehicleParams& p, const ControlGains& g) {
    const double spacing_term = g.alpha * (x.gap_error_m / p.headway_s - x.speed_mps);
    const double speed_term = g.b * (x.prev_speed_mps - x.speed_mps);
    const double accel_term = g.c * (x.prev_accel_mps2 - x.accel_mps2);
    return p.tau_s * (spacing_term + speed_term + accel_term);
}

PredictorContext build_context(const VehicleParams& ego, const VehicleParams& prev) {
    if (ego.ts_s != prev.ts_s) {
        throw ConfigError("ego and predecessor sampling periods differ");
    }
    const int l_own = ego.delay_samples();
    const int l_prev = prev.delay_samples();

    PredictorContext ctx;
    ctx.delay_transition = coupled_transition(ego.tau_s, prev.tau_s, ego.delay_s);
    ctx.delay_gap_transition =
        coupled_transition(ego.tau_s, prev.tau_s, ego.delay_s - prev.delay_s);
    const Mat5 hold = coupled_hold_integral(ego.tau_s, prev.tau_s, ego.ts_s);
    ctx.input_weights.reserve(static_cast<size_t>(std::max(l_own, l_prev)));
    for (int j = 1; j <= std::max(l_own, l_prev); ++j) {
        ctx.input_weights.push_back(
            coupled_transition(ego.tau_s, prev.tau_s, j * ego.ts_s) * hold);
    }
    ctx.own_input_map = ego_input_map(ego.tau_s);
    ctx.prev_input_map = prev_input_map(prev.tau_s);
    ctx.own_history = InputHistory(l_own);
    ctx.prev_history = InputHistory(l_prev);
    return ctx;
}

Vec5 predictor_state(const Measurement& x, const PredictorContext& ctx) {
    Vec5 q = ctx.delay_transition * x.as_vector();
    for (int j = 1; j <= ctx.own_history.size(); ++j) {
        q += ctx.input_weights[static_cast<size_t>(j - 1)] *
             (ctx.own_input_map * ctx.own_history[j]);
    }
    Vec5 prev_sum = Vec5::Zero();
    for (int j = 1; j <= ctx.prev_history.size(); ++j) {
        prev_sum += ctx.input_weights[static_cast<size_t>(j - 1)] *
                    (ctx.prev_input_map * ctx.prev_history[j]);
    }
    q += ctx.delay_gap_transition * prev_sum;
    return q;
}

double control_step(const Measurement& x, double prev_input_mps2, PredictorContext& ctx,
                    const VehicleParams& p, const ControlGains& g) {
    const Vec5 q = predictor_state(x, ctx);
    const double u = p.tau_s * (g.alpha / p.headway_s * q(0) - (g.alpha + g.b) * q(1) +
                                g.b * q(2) + g.c * (q(4) - q(3)));
    ctx.own_history.push(u);
    ctx.prev_history.push(prev_input_mps2);
    return u;
}

}  // namespace platoon
