#pragma once

#include <array>

#include "platoon/types.hpp"

namespace platoon {

// The coupled ego/predecessor state is ordered
//   (gap error, ego speed, predecessor speed, ego accel, predecessor accel),
// with open-loop dynamics
//   d/dt x = A x + B_ego u_ego + B_prev u_prev,
// where A couples the gap to the speed difference and each acceleration
// relaxes through its vehicle's first-order lag. All transition and hold
// matrices below are closed forms in (tau_ego, tau_prev), valid for any
// sign of the horizon argument.

/// System matrix A of the coupled ego/predecessor state.
/// Throws std::domain_error if either lag is not positive.
Mat5 coupled_system_matrix(double tau_ego_s, double tau_prev_s);

/// exp(A * horizon) in closed form; horizon may be negative.
Mat5 coupled_transition(double tau_ego_s, double tau_prev_s, double horizon_s);

/// integral over one sample of exp(-A * theta), theta in [0, ts]:
/// the hold-weighting matrix of the exact sampled model.
Mat5 coupled_hold_integral(double tau_ego_s, double tau_prev_s, double ts_s);

/// Ego-only (gap, speed, accel) restrictions of the closed forms above.
Mat3 ego_transition(double tau_s, double horizon_s);
Mat3 ego_hold_integral(double tau_s, double ts_s);

/// Input injection vectors: the ego input drives the ego acceleration slot,
/// the predecessor input the predecessor acceleration slot.
Vec5 ego_input_map(double tau_ego_s);
Vec5 prev_input_map(double tau_prev_s);

/// Numeric matrix exponential (scaling-and-squaring), used as the
/// independent cross-check of the closed forms and for building the
/// sampled closed-loop matrix. Throws std::domain_error on non-finite input.
Mat5 expm(const Mat5& m);
Mat3 expm(const Mat3& m);

/// Magnitudes of the three eigenvalues of a real 3x3 matrix, sorted
/// descending. Throws std::domain_error on non-finite input.
std::array<double, 3> eigenvalue_magnitudes(const Mat3& m);

}  // namespace platoon
