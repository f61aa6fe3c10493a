#include "platoon/state_matrices.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace platoon {

namespace {

void require_positive_lags(double tau_ego_s, double tau_prev_s) {
    if (!(tau_ego_s > 0.0) || !(tau_prev_s > 0.0)) {
        throw std::domain_error("vehicle lags must be positive");
    }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m) {
    if (!m.allFinite()) {
        throw std::domain_error("matrix has non-finite entries");
    }
}

}  // namespace

Mat5 coupled_system_matrix(double tau_ego_s, double tau_prev_s) {
    require_positive_lags(tau_ego_s, tau_prev_s);
    Mat5 a = Mat5::Zero();
    a(0, 1) = -1.0;
    a(0, 2) = 1.0;
    a(1, 3) = 1.0;
    a(2, 4) = 1.0;
    a(3, 3) = -1.0 / tau_ego_s;
    a(4, 4) = -1.0 / tau_prev_s;
    return a;
}

Mat5 coupled_transition(double tau_ego_s, double tau_prev_s, double horizon_s) {
    require_positive_lags(tau_ego_s, tau_prev_s);
    const double te = tau_ego_s;
    const double tp = tau_prev_s;
    const double d = horizon_s;
    const double ee = std::exp(-d / te);
    const double ep = std::exp(-d / tp);
    Mat5 m = Mat5::Identity();
    m(0, 1) = -d;
    m(0, 2) = d;
    m(0, 3) = te * te - d * te - te * te * ee;
    m(0, 4) = -tp * tp + d * tp + tp * tp * ep;
    m(1, 3) = te - te * ee;
    m(2, 4) = tp - tp * ep;
    m(3, 3) = ee;
    m(4, 4) = ep;
    return m;
}

Mat5 coupled_hold_integral(double tau_ego_s, double tau_prev_s, double ts_s) {
    require_positive_lags(tau_ego_s, tau_prev_s);
    if (!(ts_s > 0.0)) {
        throw std::domain_error("sampling period must be positive");
    }
    const double te = tau_ego_s;
    const double tp = tau_prev_s;
    const double ge = std::exp(ts_s / te);  // grows: exp(+ts/tau)
    const double gp = std::exp(ts_s / tp);
    Mat5 m = Mat5::Zero();
    m(0, 0) = ts_s;
    m(0, 1) = ts_s * ts_s / 2.0;
    m(0, 2) = -ts_s * ts_s / 2.0;
    m(0, 3) = te * te * ts_s + te * ts_s * ts_s / 2.0 - te * te * te * (ge - 1.0);
    m(0, 4) = -(tp * tp * ts_s + tp * ts_s * ts_s / 2.0 - tp * tp * tp * (gp - 1.0));
    m(1, 1) = ts_s;
    m(1, 3) = te * (ts_s + te - te * ge);
    m(2, 2) = ts_s;
    m(2, 4) = tp * (ts_s + tp - tp * gp);
    m(3, 3) = te * (ge - 1.0);
    m(4, 4) = tp * (gp - 1.0);
    return m;
}

namespace {

// The (gap, ego speed, ego accel) block is closed under the dynamics, so the
// 3x3 forms are the {0, 1, 3} principal restrictions of the 5x5 ones.
Mat3 restrict_ego(const Mat5& m) {
    constexpr int idx[3] = {0, 1, 3};
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r(i, j) = m(idx[i], idx[j]);
        }
    }
    return r;
}

}  // namespace

Mat3 ego_transition(double tau_s, double horizon_s) {
    return restrict_ego(coupled_transition(tau_s, tau_s, horizon_s));
}

Mat3 ego_hold_integral(double tau_s, double ts_s) {
    return restrict_ego(coupled_hold_integral(tau_s, tau_s, ts_s));
}

Vec5 ego_input_map(double tau_ego_s) {
    require_positive_lags(tau_ego_s, 1.0);
    Vec5 b = Vec5::Zero();
    b(3) = 1.0 / tau_ego_s;
    return b;
}

Vec5 prev_input_map(double tau_prev_s) {
    require_positive_lags(1.0, tau_prev_s);
    Vec5 b = Vec5::Zero();
    b(4) = 1.0 / tau_prev_s;
    return b;
}

Mat5 expm(const Mat5& m) {
    require_finite(m);
    return m.exp();
}

Mat3 expm(const Mat3& m) {
    require_finite(m);
    return m.exp();
}

std::array<double, 3> eigenvalue_magnitudes(const Mat3& m) {
    require_finite(m);
    Eigen::EigenSolver<Mat3> solver(m, /*computeEigenvectors=*/false);
    std::array<double, 3> mags;
    for (int i = 0; i < 3; ++i) {
        mags[static_cast<size_t>(i)] = std::abs(solver.eigenvalues()(i));
    }
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    return mags;
}

}  // namespace platoon
