#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace platoon {

using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat3 = Eigen::Matrix<double, 3, 3>;
using Vec3 = Eigen::Matrix<double, 3, 1>;

/// Thrown for inconsistent run/scenario configuration (bad step ratios,
/// delay granularity, malformed config files). Distinct from
/// std::domain_error, which is reserved for invalid numeric arguments.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Physical and sampling constants of one vehicle.
///
/// Units are carried in the field names: seconds, meters. `delay_s` is the
/// actuation dead time, `comm_delay_s` the latency of the incoming V2V link
/// (0 for the platoon leader). Delays must be integer multiples of `ts_s`.
struct VehicleParams {
    double tau_s = 0.0;             ///< first-order driveline lag, > 0
    double delay_s = 0.0;           ///< actuation dead time, >= 0
    double comm_delay_s = 0.0;      ///< incoming V2V latency, >= 0
    double headway_s = 0.0;         ///< desired time headway, > 0 for followers
    double standstill_gap_m = 0.0;  ///< desired gap at zero speed
    double ts_s = 0.0;              ///< controller sampling period, > 0

    int delay_samples() const { return sample_count(delay_s, "delay_s"); }
    int comm_delay_samples() const { return sample_count(comm_delay_s, "comm_delay_s"); }

private:
    int sample_count(double interval_s, const char* field) const {
        if (ts_s <= 0.0) {
            throw ConfigError("ts_s must be positive");
        }
        const double ratio = interval_s / ts_s;
        const int n = static_cast<int>(std::lround(ratio));
        if (n < 0 || std::abs(ratio - n) > 1e-6 * std::max(1.0, std::abs(ratio))) {
            throw ConfigError(std::string(field) + " = " + std::to_string(interval_s) +
                              " is not a whole multiple of ts_s = " + std::to_string(ts_s));
        }
        return n;
    }
};

/// Feedback gains of the spacing/speed/acceleration law.
struct ControlGains {
    double alpha = 0.0;  ///< spacing-error gain, > 0 (1/s^2)
    double b = 0.0;      ///< speed-error gain, > 0 (1/s)
    double c = 0.0;      ///< acceleration-error gain, >= 0 (dimensionless)
};

}  // namespace platoon
