#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "platoon/types.hpp"

namespace platoon {

/// Parameters of the speed-coupling transfer function between one follower
/// and its predecessor.
struct SpeedCouplingParams {
    double alpha = 0.0;
    double b = 0.0;
    double c = 0.0;
    double headway_s = 0.0;
    double tau_s = 0.0;         ///< ego lag
    double tau_prev_s = 0.0;    ///< predecessor lag
    double delay_s = 0.0;       ///< ego actuation delay
    double delay_prev_s = 0.0;  ///< predecessor actuation delay
};

SpeedCouplingParams make_coupling_params(const VehicleParams& ego, const VehicleParams& prev,
                                         const ControlGains& gains);

/// Continuous closed-loop speed ratio evaluated at s = j*omega, including the
/// pure-delay factor exp(-(D - D_prev) s). Unity at omega = 0.
std::complex<double> continuous_speed_ratio(const SpeedCouplingParams& p, double omega);

/// Bilinear-transform discretization of the continuous speed ratio:
///   G(z) = z^{-delay_exponent} * num(z) / den(z),
/// cubic num/den. The coefficient sums of num and den cancel analytically to
/// the same value, so the DC gain is exactly one; dc_gain() evaluates the
/// sums in extended precision to preserve that identity to ~1e-13.
struct DiscreteTransferFunction {
    std::array<double, 4> num{};  ///< z^3..z^0 coefficients
    std::array<double, 4> den{};
    int delay_exponent = 0;       ///< may be negative
    double ts_s = 0.0;

    std::complex<double> eval(const std::complex<double>& z) const;
    /// |G(e^{j omega ts})|; the pure-delay factor has unit magnitude and is skipped.
    double magnitude(double omega) const;
    double dc_gain() const { return dc_gain_; }

private:
    friend DiscreteTransferFunction tustin_speed_ratio(const SpeedCouplingParams&, double);
    double dc_gain_ = 1.0;
};

/// Discretizes the speed ratio with the bilinear substitution
/// s = (2/ts)(z-1)/(z+1). Both delays must sit on the ts sample grid.
DiscreteTransferFunction tustin_speed_ratio(const SpeedCouplingParams& p, double ts_s);

/// Strictly increasing frequency grid over (0, pi/ts].
struct FrequencyGrid {
    std::vector<double> omegas;

    /// Logarithmically spaced points over [1e-4, pi/ts] with the Nyquist
    /// endpoint exact.
    static FrequencyGrid standard(double ts_s, int points = 20000);
};

/// sup over the grid of |G(e^{j omega ts})|, refined around the best cell by
/// golden-section search, with the exact DC value included analytically.
double string_stability_margin(const DiscreteTransferFunction& tf, const FrequencyGrid& grid);

/// Margin at or below this bound counts as string stable (the DC gain is
/// exactly one, so a strict <= 1 test would flap on rounding).
inline constexpr double kStringStableMargin = 1.0 + 1e-6;

/// One-sample transition matrix of the sampled closed loop of a single
/// vehicle under the delay-compensated law: all eigenvalues inside the unit
/// circle means the vehicle is stable for this sampling period.
Mat3 vehicle_stability_matrix(const VehicleParams& p, const ControlGains& g);

struct Range {
    double min = 0.0;
    double max = 0.0;
    int steps = 0;  ///< number of samples, >= 1 (endpoints included)

    double at(int k) const {
        return steps < 2 ? min : min + (max - min) * k / (steps - 1);
    }
};

/// Margin over an (alpha, b) grid; margins stored row-major, alpha outer.
struct MarginField {
    std::vector<double> alphas;
    std::vector<double> bs;
    std::vector<double> margins;
    std::vector<std::uint8_t> stable;  ///< margin <= kStringStableMargin

    double at(int alpha_idx, int b_idx) const {
        return margins[static_cast<size_t>(alpha_idx) * bs.size() +
                       static_cast<size_t>(b_idx)];
    }
};

MarginField sweep_alpha_b(const SpeedCouplingParams& base, const Range& alpha,
                          const Range& b, double ts_s, int grid_points = 20000);

/// Margin versus delay difference (ego minus predecessor); every delta must
/// sit on the ts sample grid. Returns (delta, margin) pairs.
std::vector<std::pair<double, double>> sweep_delay_diff(const SpeedCouplingParams& base,
                                                        const Range& delta, double ts_s,
                                                        int grid_points = 20000);

struct SamplingSweep {
    std::vector<double> ts_values;
    std::vector<double> max_eigenvalue;
    /// Unit-circle crossing located by bisection (to 1e-3 s); empty when the
    /// curve does not cross within the range.
    std::optional<double> threshold_s;
};

SamplingSweep sweep_sampling_period(const VehicleParams& p, const ControlGains& g,
                                    const Range& ts);

}  // namespace platoon
