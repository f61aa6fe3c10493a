#include "platoon/stability.hpp"

#include <algorithm>
#include <cmath>

#include "platoon/state_matrices.hpp"

namespace platoon {

SpeedCouplingParams make_coupling_params(const VehicleParams& ego, const VehicleParams& prev,
                                         const ControlGains& gains) {
    SpeedCouplingParams p;
    p.alpha = gains.alpha;
    p.b = gains.b;
    p.c = gains.c;
    p.headway_s = ego.headway_s;
    p.tau_s = ego.tau_s;
    p.tau_prev_s = prev.tau_s;
    p.delay_s = ego.delay_s;
    p.delay_prev_s = prev.delay_s;
    return p;
}

namespace {

// Numerator of the continuous speed ratio is
//   exp(-dd s) * (C2 s^2 + C1 s + C0), dd = delay - delay_prev,
// with the coefficients below; the denominator is the closed-loop cubic.
struct QuadCoeffs {
    double c2, c1, c0;
};

QuadCoeffs numerator_coeffs(const SpeedCouplingParams& p) {
    const double k = p.alpha / p.headway_s;
    const double dd = p.delay_s - p.delay_prev_s;
    const double tp = p.tau_prev_s;
    QuadCoeffs q;
    q.c2 = k * tp * dd + p.b * tp - k * tp * tp +
           std::exp(-dd / tp) * (k * tp * tp - p.b * tp + p.c);
    q.c1 = dd * k + p.b;
    q.c0 = k;
    return q;
}

}  // namespace

std::complex<double> continuous_speed_ratio(const SpeedCouplingParams& p, double omega) {
    const std::complex<double> s(0.0, omega);
    const QuadCoeffs q = numerator_coeffs(p);
    const double dd = p.delay_s - p.delay_prev_s;
    const std::complex<double> num = std::exp(-dd * s) * (q.c2 * s * s + q.c1 * s + q.c0);
    const std::complex<double> den =
        s * s * s + (1.0 / p.tau_s + p.c) * s * s + (p.alpha + p.b) * s + q.c0;
    if (std::abs(den) == 0.0) {
        throw std::domain_error("speed-ratio denominator vanishes on the imaginary axis");
    }
    return num / den;
}

std::complex<double> DiscreteTransferFunction::eval(const std::complex<double>& z) const {
    const std::complex<double> n = ((num[0] * z + num[1]) * z + num[2]) * z + num[3];
    const std::complex<double> d = ((den[0] * z + den[1]) * z + den[2]) * z + den[3];
    return std::pow(z, -delay_exponent) * n / d;
}

double DiscreteTransferFunction::magnitude(double omega) const {
    const std::complex<double> z = std::polar(1.0, omega * ts_s);
    const std::complex<double> n = ((num[0] * z + num[1]) * z + num[2]) * z + num[3];
    const std::complex<double> d = ((den[0] * z + den[1]) * z + den[2]) * z + den[3];
    return std::abs(n / d);
}

DiscreteTransferFunction tustin_speed_ratio(const SpeedCouplingParams& p, double ts_s) {
    if (!(ts_s > 0.0)) {
        throw std::domain_error("sampling period must be positive");
    }
    const double samples = (p.delay_s - p.delay_prev_s) / ts_s;
    const int delay_exp = static_cast<int>(std::lround(samples));
    if (std::abs(samples - delay_exp) > 1e-6 * std::max(1.0, std::abs(samples))) {
        throw ConfigError("delay difference is not a whole multiple of the sampling period");
    }

    // Extended precision keeps the analytic cancellation of the coefficient
    // sums (both collapse to 8 alpha tau ts^3) visible in the DC gain.
    using ld = long double;
    const ld k = static_cast<ld>(p.alpha) / p.headway_s;
    const ld dd = static_cast<ld>(p.delay_s) - p.delay_prev_s;
    const ld tp = p.tau_prev_s;
    const ld ti = p.tau_s;
    const ld h = p.headway_s;
    const ld al = p.alpha;
    const ld b = p.b;
    const ld c = p.c;
    const ld ts = ts_s;
    const ld bracket =
        k * tp * dd + b * tp - k * tp * tp + std::exp(-dd / tp) * (k * tp * tp - b * tp + c);
    const ld lin = dd * k + b;

    const ld x = 4.0L * bracket * h * ti * ts;
    const ld y = 2.0L * lin * h * ti * ts * ts;
    const ld z = al * ti * ts * ts * ts;
    const std::array<ld, 4> num = {x + y + z, -x + y + 3.0L * z, -x - y + 3.0L * z,
                                   x - y + z};

    const ld p3 = 8.0L * h * ti;
    const ld p2 = 4.0L * h * ts + 4.0L * c * h * ti * ts;
    const ld p1 = 2.0L * (al + b) * h * ti * ts * ts;
    const std::array<ld, 4> den = {p3 + p2 + p1 + z, -3.0L * p3 - p2 + p1 + 3.0L * z,
                                   3.0L * p3 - p2 - p1 + 3.0L * z, -p3 + p2 - p1 + z};

    DiscreteTransferFunction tf;
    tf.ts_s = ts_s;
    tf.delay_exponent = delay_exp;
    ld num_sum = 0.0L, den_sum = 0.0L;
    for (int i = 0; i < 4; ++i) {
        tf.num[static_cast<size_t>(i)] = static_cast<double>(num[static_cast<size_t>(i)]);
        tf.den[static_cast<size_t>(i)] = static_cast<double>(den[static_cast<size_t>(i)]);
        num_sum += num[static_cast<size_t>(i)];
        den_sum += den[static_cast<size_t>(i)];
    }
    tf.dc_gain_ = static_cast<double>(num_sum / den_sum);
    return tf;
}

FrequencyGrid FrequencyGrid::standard(double ts_s, int points) {
    if (!(ts_s > 0.0) || points < 2) {
        throw std::domain_error("invalid frequency grid request");
    }
    FrequencyGrid grid;
    grid.omegas.resize(static_cast<size_t>(points));
    const double lo = std::log(1e-4);
    const double hi = std::log(M_PI / ts_s);
    for (int i = 0; i < points; ++i) {
        grid.omegas[static_cast<size_t>(i)] = std::exp(lo + (hi - lo) * i / (points - 1));
    }
    grid.omegas.back() = M_PI / ts_s;  // exact Nyquist endpoint
    return grid;
}

namespace {

double golden_section_max(const DiscreteTransferFunction& tf, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = tf.magnitude(c);
    double fd = tf.magnitude(d);
    for (int it = 0; it < 120 && (b - a) > 1e-13 * std::max(1.0, b); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = tf.magnitude(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = tf.magnitude(d);
        }
    }
    return std::max(fc, fd);
}

}  // namespace

double string_stability_margin(const DiscreteTransferFunction& tf, const FrequencyGrid& grid) {
    double best = 0.0;
    size_t best_idx = 0;
    for (size_t i = 0; i < grid.omegas.size(); ++i) {
        const double mag = tf.magnitude(grid.omegas[i]);
        if (mag > best) {
            best = mag;
            best_idx = i;
        }
    }
    const double lo = grid.omegas[best_idx == 0 ? 0 : best_idx - 1];
    const double hi = grid.omegas[std::min(best_idx + 1, grid.omegas.size() - 1)];
    if (hi > lo) {
        best = std::max(best, golden_section_max(tf, lo, hi));
    }
    return std::max(best, tf.dc_gain());
}

Mat3 vehicle_stability_matrix(const VehicleParams& p, const ControlGains& g) {
    // One-sample closed loop exp(A ts) (I + int_0^ts exp(-A w) dw * B K) with
    // the feedback row K = tau * [alpha/h, -(alpha+b), -c] acting on
    // (gap error, speed, accel).
    const Mat3 transition = ego_transition(p.tau_s, p.ts_s);
    const Mat3 hold = ego_hold_integral(p.tau_s, p.ts_s);
    Vec3 input = Vec3::Zero();
    input(2) = 1.0 / p.tau_s;
    Eigen::RowVector3d feedback;
    feedback << p.tau_s * g.alpha / p.headway_s, -p.tau_s * (g.alpha + g.b), -p.tau_s * g.c;
    return transition * (Mat3::Identity() + hold * input * feedback);
}

MarginField sweep_alpha_b(const SpeedCouplingParams& base, const Range& alpha, const Range& b,
                          double ts_s, int grid_points) {
    if (!(alpha.min > 0.0) || !(b.min > 0.0)) {
        throw std::domain_error("gain sweep ranges must be positive");
    }
    const FrequencyGrid grid = FrequencyGrid::standard(ts_s, grid_points);
    MarginField field;
    field.alphas.resize(static_cast<size_t>(alpha.steps));
    field.bs.resize(static_cast<size_t>(b.steps));
    for (int i = 0; i < alpha.steps; ++i) field.alphas[static_cast<size_t>(i)] = alpha.at(i);
    for (int j = 0; j < b.steps; ++j) field.bs[static_cast<size_t>(j)] = b.at(j);
    field.margins.resize(field.alphas.size() * field.bs.size());
    field.stable.resize(field.margins.size());
    for (int i = 0; i < alpha.steps; ++i) {
        for (int j = 0; j < b.steps; ++j) {
            SpeedCouplingParams p = base;
            p.alpha = alpha.at(i);
            p.b = b.at(j);
            const double margin =
                string_stability_margin(tustin_speed_ratio(p, ts_s), grid);
            const size_t idx = static_cast<size_t>(i) * field.bs.size() +
                               static_cast<size_t>(j);
            field.margins[idx] = margin;
            field.stable[idx] = margin <= kStringStableMargin ? 1 : 0;
        }
    }
    return field;
}

std::vector<std::pair<double, double>> sweep_delay_diff(const SpeedCouplingParams& base,
                                                        const Range& delta, double ts_s,
                                                        int grid_points) {
    const FrequencyGrid grid = FrequencyGrid::standard(ts_s, grid_points);
    std::vector<std::pair<double, double>> curve;
    curve.reserve(static_cast<size_t>(delta.steps));
    for (int k = 0; k < delta.steps; ++k) {
        SpeedCouplingParams p = base;
        p.delay_prev_s = 0.0;
        p.delay_s = delta.at(k);  // only the difference enters the ratio
        curve.emplace_back(delta.at(k),
                           string_stability_margin(tustin_speed_ratio(p, ts_s), grid));
    }
    return curve;
}

SamplingSweep sweep_sampling_period(const VehicleParams& p, const ControlGains& g,
                                    const Range& ts) {
    if (!(ts.min > 0.0)) {
        throw std::domain_error("sampling-period sweep must start above zero");
    }
    SamplingSweep sweep;
    sweep.ts_values.resize(static_cast<size_t>(ts.steps));
    sweep.max_eigenvalue.resize(static_cast<size_t>(ts.steps));
    auto max_eig = [&](double ts_value) {
        VehicleParams q = p;
        q.ts_s = ts_value;
        return eigenvalue_magnitudes(vehicle_stability_matrix(q, g))[0];
    };
    for (int k = 0; k < ts.steps; ++k) {
        sweep.ts_values[static_cast<size_t>(k)] = ts.at(k);
        sweep.max_eigenvalue[static_cast<size_t>(k)] = max_eig(ts.at(k));
    }
    for (int k = 1; k < ts.steps; ++k) {
        const bool below = sweep.max_eigenvalue[static_cast<size_t>(k - 1)] < 1.0;
        const bool above = sweep.max_eigenvalue[static_cast<size_t>(k)] >= 1.0;
        if (!(below && above)) continue;
        double lo = sweep.ts_values[static_cast<size_t>(k - 1)];
        double hi = sweep.ts_values[static_cast<size_t>(k)];
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            (max_eig(mid) >= 1.0 ? hi : lo) = mid;
        }
        sweep.threshold_s = 0.5 * (lo + hi);
        break;
    }
    return sweep;
}

}  // namespace platoon
