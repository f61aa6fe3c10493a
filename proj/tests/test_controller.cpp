#include <doctest.h>

#include <random>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/presets.hpp"

using namespace platoon;

namespace {

VehicleParams params(double tau, double delay, double ts = 0.01, double headway = 1.0) {
    VehicleParams p;
    p.tau_s = tau;
    p.delay_s = delay;
    p.comm_delay_s = 0.0;
    p.headway_s = headway;
    p.standstill_gap_m = 10.0;
    p.ts_s = ts;
    return p;
}

Measurement random_measurement(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    return {u(rng), u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("nominal control at equilibrium and single-term activation") {
    const ControlGains g{1.0, 1.0, 0.0};
    const VehicleParams p = params(1.0, 0.0);
    CHECK(nominal_control({}, p, g) == 0.0);
    Measurement x;
    x.gap_error_m = 1.0;
    CHECK(nominal_control(x, p, g) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("nominal control hand-computed value") {
    const VehicleParams p = params(0.067, 0.3);
    const ControlGains g{7.5, 12.5, 0.0};
    Measurement x;
    x.speed_mps = 10.0;
    x.prev_speed_mps = 9.0;
    // 0.067 * 7.5 * (0 - 10) + 0.067 * 12.5 * (9 - 10)
    CHECK(nominal_control(x, p, g) == doctest::Approx(-5.8625).epsilon(1e-12));
}

TEST_CASE("build_context shapes and identities") {
    SUBCASE("equal delays give an identity gap transition") {
        const auto ctx = build_context(params(0.1, 0.3), params(0.2, 0.3));
        CHECK((ctx.delay_gap_transition - Mat5::Identity()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("reference pair 0-1 sample counts") {
        const auto ctx = build_context(presets::reference_params(1), presets::reference_params(0));
        CHECK(ctx.own_history.size() == 30);
        CHECK(ctx.prev_history.size() == 15);
        CHECK(ctx.input_weights.size() == 30);
    }
    SUBCASE("reference pair 2-3 uses the negative delay difference") {
        const auto ctx = build_context(presets::reference_params(3), presets::reference_params(2));
        const Mat5 expected = coupled_transition(0.2, 0.1, -0.2);
        // the context computes 0.4 - 0.6, one ulp away from the literal -0.2
        CHECK((ctx.delay_gap_transition - expected).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("input weights match transition times hold integral") {
        const auto ctx = build_context(params(0.067, 0.05), params(0.1, 0.03));
        const Mat5 hold = coupled_hold_integral(0.067, 0.1, 0.01);
        for (size_t j = 1; j <= ctx.input_weights.size(); ++j) {
            const Mat5 expected =
                expm(Mat5(coupled_system_matrix(0.067, 0.1) * (0.01 * j))) * hold;
            CHECK((ctx.input_weights[j - 1] - expected).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SUBCASE("mismatched sampling periods are rejected") {
        CHECK_THROWS_AS(build_context(params(0.1, 0.3, 0.01), params(0.1, 0.3, 0.02)),
                        ConfigError);
    }
    SUBCASE("delays off the sample grid are rejected") {
        CHECK_THROWS_AS(build_context(params(0.1, 0.305), params(0.1, 0.3)), ConfigError);
    }
}

TEST_CASE("predictor state reduces to the measurement without delays") {
    auto ctx = build_context(params(0.1, 0.0), params(0.2, 0.0));
    std::mt19937_64 rng(7);
    const Measurement x = random_measurement(rng);
    CHECK((predictor_state(x, ctx) - x.as_vector()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(predictor_state({}, ctx).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero state and zero histories predict zero") {
    auto ctx = build_context(params(0.067, 0.3), params(0.067, 0.15));
    CHECK(predictor_state({}, ctx).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("delay-free control equals the nominal law") {
    auto ego = params(0.067, 0.0);
    auto ctx = build_context(ego, params(0.067, 0.0));
    const ControlGains g{7.5, 12.5, 0.4};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Measurement x = random_measurement(rng);
        const double with_predictor = control_step(x, 0.0, ctx, ego, g);
        CHECK(with_predictor == doctest::Approx(nominal_control(x, ego, g)).epsilon(1e-12));
    }
}

TEST_CASE("control is linear in measurement and histories") {
    const auto ego = params(0.067, 0.2);
    const auto prev = params(0.1, 0.1);
    const ControlGains g{5.0, 10.0, 1.0};
    const double beta = -2.375;
    auto ctx1 = build_context(ego, prev);
    auto ctx2 = build_context(ego, prev);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uprev(-3.0, 3.0);
    for (int k = 0; k < 60; ++k) {
        const Measurement x = random_measurement(rng);
        Measurement xs = x;
        xs.gap_error_m *= beta;
        xs.speed_mps *= beta;
        xs.prev_speed_mps *= beta;
        xs.accel_mps2 *= beta;
        xs.prev_accel_mps2 *= beta;
        const double up = uprev(rng);
        const double u1 = control_step(x, up, ctx1, ego, g);
        const double u2 = control_step(xs, beta * up, ctx2, ego, g);
        CHECK(u2 == doctest::Approx(beta * u1).epsilon(1e-10));
    }
}

TEST_CASE("the current command never enters its own prediction") {
    const auto ego = params(0.067, 0.1);
    const auto prev = params(0.1, 0.05);
    const ControlGains g{7.5, 12.5, 0.0};
    auto ctx = build_context(ego, prev);
    std::mt19937_64 rng(17);
    for (int k = 0; k < 30; ++k) {
        const Measurement x = random_measurement(rng);
        const Vec5 q = predictor_state(x, ctx);  // before the push
        const double expected =
            ego.tau_s * (g.alpha / ego.headway_s * q(0) - (g.alpha + g.b) * q(1) +
                         g.b * q(2) + g.c * (q(4) - q(3)));
        CHECK(control_step(x, 0.5, ctx, ego, g) == expected);
    }
}

TEST_CASE("histories hold exactly the pushed samples, newest first") {
    const auto ego = params(0.067, 0.05);
    const auto prev = params(0.1, 0.03);
    const ControlGains g{7.5, 12.5, 0.0};
    auto ctx = build_context(ego, prev);
    std::vector<double> own, received;
    std::mt19937_64 rng(19);
    for (int k = 0; k < 12; ++k) {
        const double up = static_cast<double>(k) + 0.5;
        own.push_back(control_step(random_measurement(rng), up, ctx, ego, g));
        received.push_back(up);
        // after the call for step k the newest entry (age 1) is u_k itself,
        // so the next step's sums see u_{(k+1)-j} at age j
        for (int age = 1; age <= ctx.own_history.size(); ++age) {
            const int idx = k - age + 1;
            CHECK(ctx.own_history[age] == (idx < 0 ? 0.0 : own[static_cast<size_t>(idx)]));
        }
        for (int age = 1; age <= ctx.prev_history.size(); ++age) {
            const int idx = k - age + 1;
            CHECK(ctx.prev_history[age] ==
                  (idx < 0 ? 0.0 : received[static_cast<size_t>(idx)]));
        }
    }
}

// Closed-loop consistency: running the exact sampled plant under the
// predictor-based law, the ego components of the prediction at step k must
// reproduce the plant speed/acceleration at step k + delay_samples.
TEST_CASE("prediction matches the plant one delay ahead") {
    const double ts = 0.01;
    const auto ego = params(0.067, 0.3, ts);
    const auto prev = params(0.067, 0.15, ts);
    const ControlGains g{7.5, 12.5, 0.0};
    auto ctx = build_context(ego, prev);
    const int l = ego.delay_samples();

    const double prev_speed = 8.0;  // predecessor coasts, zero input
    double gap = 18.0, speed = 9.0, accel = 0.0;
    std::vector<double> pending(static_cast<size_t>(l), 0.0);  // in-flight commands
    std::vector<double> q_speed, q_accel, plant_speed, plant_accel;
    const double decay = 1.0 - std::exp(-ts / ego.tau_s);
    for (int k = 0; k < 900; ++k) {
        plant_speed.push_back(speed);
        plant_accel.push_back(accel);
        Measurement x{gap - ego.standstill_gap_m, speed, prev_speed, accel, 0.0};
        const Vec5 q = predictor_state(x, ctx);
        q_speed.push_back(q(1));
        q_accel.push_back(q(3));
        const double u = control_step(x, 0.0, ctx, ego, g);
        const double applied = pending.front();
        pending.erase(pending.begin());
        pending.push_back(u);
        // exact one-sample plant update with the held input
        const double displacement =
            speed * ts + accel * ego.tau_s * (ts - ego.tau_s * decay) +
            applied * (ts * ts / 2.0 - ego.tau_s * ts + ego.tau_s * ego.tau_s * decay);
        gap += prev_speed * ts - displacement;
        speed += accel * ego.tau_s * decay + applied * (ts - ego.tau_s * decay);
        accel = accel * (1.0 - decay) + applied * decay;
    }
    double worst = 0.0;
    for (size_t k = 0; k + static_cast<size_t>(l) < plant_speed.size(); ++k) {
        worst = std::max(worst, std::abs(q_speed[k] - plant_speed[k + static_cast<size_t>(l)]));
        worst = std::max(worst, std::abs(q_accel[k] - plant_accel[k + static_cast<size_t>(l)]));
    }
    CHECK(worst <= 1e-8);
}

// With zero predecessor input, the predecessor slots of the prediction are
// its free response, shifted one ego delay ahead of the (comm-delayed)
// measurement.
TEST_CASE("predecessor slots follow the free response shifted by the ego delay") {
    const double ts = 0.01;
    auto ego = params(0.1, 0.2, ts);
    ego.comm_delay_s = 0.03;
    const auto prev = params(0.25, 0.1, ts);
    const ControlGains g{5.0, 10.0, 1.0};
    auto ctx = build_context(ego, prev);

    const double v0 = 7.0, a0 = 0.8;  // predecessor free response from (v0, a0)
    auto free_speed = [&](double t) {
        return v0 + a0 * prev.tau_s * (1.0 - std::exp(-t / prev.tau_s));
    };
    auto free_accel = [&](double t) { return a0 * std::exp(-t / prev.tau_s); };

    const int comm = ego.comm_delay_samples();
    double worst = 0.0;
    for (int k = comm; k < 400; ++k) {
        const double t_meas = (k - comm) * ts;  // time of the received sample
        Measurement x;
        x.prev_speed_mps = free_speed(t_meas);
        x.prev_accel_mps2 = free_accel(t_meas);
        const Vec5 q = predictor_state(x, ctx);
        const double t_pred = t_meas + ego.delay_s;
        worst = std::max(worst, std::abs(q(2) - free_speed(t_pred)));
        worst = std::max(worst, std::abs(q(4) - free_accel(t_pred)));
        control_step(x, 0.0, ctx, ego, g);
    }
    CHECK(worst <= 1e-8);
}
