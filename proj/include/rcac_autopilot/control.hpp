// Copyright 2026 The rcac-autopilot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cassert>

#include "rcac_autopilot/geometry.hpp"

namespace rcac_autopilot {

// The 27 tuning gains of the cascaded controller plus the full-quaternion
// time constant tau. All PID loops use the shift-operator discrete forms:
// the integrator accumulates the raw per-step error and the derivative is a
// per-step backward difference, so the gains absorb the sample period.
//
// The defaults give a well-separated cascade on the default vehicle
// (position ~1/s, velocity ~3/s, attitude ~6.5/s, body rate ~25/s).
struct GainSet {
  Vec3 K_r{0.95, 0.95, 1.0};
  Vec3 K_vP{12.0, 12.0, 14.0};
  Vec3 K_vI{0.5, 0.5, 1.5};
  Vec3 K_vD{1.0, 1.0, 0.0};
  Vec3 K_q{14.0, 14.0, 3.0};
  double tau{0.4};
  Vec3 K_wP{1.2, 1.2, 0.6};
  Vec3 K_wI{0.2, 0.2, 0.1};
  Vec3 K_wD{0.015, 0.015, 0.0};
  Vec3 K_wff{Vec3::Zero()};
};

// Scales all 27 gains by alpha_p; tau is not a gain and stays put.
inline GainSet detune(const GainSet& g, double alpha_p) {
  assert(alpha_p > 0.0);
  GainSet out = g;
  out.K_r *= alpha_p;
  out.K_vP *= alpha_p;
  out.K_vI *= alpha_p;
  out.K_vD *= alpha_p;
  out.K_q *= alpha_p;
  out.K_wP *= alpha_p;
  out.K_wI *= alpha_p;
  out.K_wD *= alpha_p;
  out.K_wff *= alpha_p;
  return out;
}

// Saturation envelopes and trim shared by the cascade.
struct ControlLimits {
  double max_speed{5.0};                  // m/s, norm clamp on v_sp
  double max_force{4.0 * 9.81};           // N, norm clamp on f_sp
  double min_lift{1.0};                   // N, upward floor on -f_sp_z
  Vec3 max_rate{3.5, 3.5, 2.0};           // rad/s, per-axis clamp on omega_sp
  Vec3 max_moment{1.5, 1.5, 0.3};         // N m, per-axis clamp on M_sp
  double integrator_clamp_v{1.0};         // symmetric clamp on gamma_v
  double integrator_clamp_w{1.0};         // symmetric clamp on gamma_omega
  bool integrator_clamp_enabled{true};
  double hover_thrust{2.0 * 9.81};        // N, m*g trim added by the velocity loop
};

// f2q is undefined at zero force; below this norm a level attitude is
// returned and the degenerate flag raised.
inline constexpr double kF2qMinForce = 1e-3;

// Setpoints flowing down the cascade: mission-planner inputs on top, the
// latest values produced by each loop below.
struct SetpointChain {
  Vec3 r_sp{Vec3::Zero()};
  Vec3 v_sp_ff{Vec3::Zero()};
  double psi_sp{0.0};
  double psi_rate_sp_ff{0.0};
  Vec3 v_sp{Vec3::Zero()};
  Vec3 f_sp{Vec3::Zero()};
  UnitQuaternion q_sp{};
  Vec3 omega_sp{Vec3::Zero()};
  Vec3 moment_sp{Vec3::Zero()};
};

// Per-loop integrator and derivative buffers plus the most recent errors.
struct LoopErrors {
  Vec3 z_r{Vec3::Zero()};
  Vec3 z_v{Vec3::Zero()};
  Vec3 z_q{Vec3::Zero()};
  Vec3 z_omega{Vec3::Zero()};
  Vec3 gamma_v{Vec3::Zero()};
  Vec3 z_v_prev{Vec3::Zero()};
  Vec3 gamma_w{Vec3::Zero()};
  Vec3 z_w_prev{Vec3::Zero()};
};

inline Vec3 clamp_norm(const Vec3& v, double max_norm, bool* clipped = nullptr) {
  const double n = v.norm();
  if (n > max_norm) {
    if (clipped) *clipped = true;
    return v * (max_norm / n);
  }
  return v;
}

inline Vec3 clamp_per_axis(const Vec3& v, const Vec3& bound, bool* clipped = nullptr) {
  Vec3 out = v;
  for (int i = 0; i < 3; ++i) {
    const double c = std::clamp(v(i), -bound(i), bound(i));
    if (clipped && c != v(i)) *clipped = true;
    out(i) = c;
  }
  return out;
}

// Keeps the force setpoint in the flyable hemisphere (thrust points up) and
// inside the thrust envelope. Without the lift floor a hard braking command
// would ask f2q for an inverted attitude.
inline Vec3 clamp_force_setpoint(const Vec3& f, const ControlLimits& lim,
                                 bool* clipped = nullptr) {
  Vec3 out = f;
  if (out.z() > -lim.min_lift) {
    out.z() = -lim.min_lift;
    if (clipped) *clipped = true;
  }
  return clamp_norm(out, lim.max_force, clipped);
}

// --- position loop (P + feedforward) ---------------------------------------

inline Vec3 position_controller_unclamped(const Vec3& r_sp, const Vec3& r_meas,
                                          const Vec3& v_sp_ff, const GainSet& g) {
  const Vec3 z_r = r_sp - r_meas;
  return g.K_r.cwiseProduct(z_r) + v_sp_ff;
}

inline Vec3 position_controller(const Vec3& r_sp, const Vec3& r_meas, const Vec3& v_sp_ff,
                                const GainSet& g, const ControlLimits& lim,
                                bool* clipped = nullptr) {
  return clamp_norm(position_controller_unclamped(r_sp, r_meas, v_sp_ff, g), lim.max_speed,
                    clipped);
}

// --- velocity loop (three decoupled PIDs about the hover trim) --------------

// Advances the integrator/derivative buffers with the current error and
// returns the unclamped force setpoint. dt is part of the loop contract but
// the shift-operator gain convention absorbs it.
inline Vec3 velocity_controller_unclamped(const Vec3& v_sp, const Vec3& v_meas,
                                          LoopErrors& e, const GainSet& g,
                                          const ControlLimits& lim, double dt) {
  assert(dt > 0.0);
  (void)dt;
  const Vec3 z_v = v_sp - v_meas;
  e.z_v = z_v;
  e.gamma_v += z_v;
  if (lim.integrator_clamp_enabled) {
    e.gamma_v = clamp_per_axis(e.gamma_v, Vec3::Constant(lim.integrator_clamp_v));
  }
  const Vec3 dz = z_v - e.z_v_prev;
  e.z_v_prev = z_v;
  Vec3 f = g.K_vP.cwiseProduct(z_v) + g.K_vI.cwiseProduct(e.gamma_v) + g.K_vD.cwiseProduct(dz);
  f.z() -= lim.hover_thrust;
  return f;
}

inline Vec3 velocity_controller(const Vec3& v_sp, const Vec3& v_meas, LoopErrors& e,
                                const GainSet& g, const ControlLimits& lim, double dt,
                                bool* clipped = nullptr) {
  return clamp_force_setpoint(velocity_controller_unclamped(v_sp, v_meas, e, g, lim, dt),
                              lim, clipped);
}

// --- f2q ---------------------------------------------------------------------

// Maps a force setpoint and azimuth setpoint to the attitude setpoint.
//
// The body k axis points down while the commanded force points up, so the
// construction aligns k_body with -f_sp/|f_sp|: after the azimuth rotation,
// the elevation zeroes the 1-component and the bank zeroes the 2-component
// of the target axis, leaving it exactly along +k of the rotated frame.
inline UnitQuaternion f2q(const Vec3& f_sp, double psi_sp, bool* degenerate = nullptr) {
  const double fn = f_sp.norm();
  if (fn < kF2qMinForce) {
    if (degenerate) *degenerate = true;
    return euler_to_quat({psi_sp, 0.0, 0.0});
  }
  const Vec3 k_e = -f_sp / fn;
  const Vec3 k_a = axis_rotation(3, psi_sp) * k_e;
  const double theta_sp = std::atan2(k_a.x(), k_a.z());
  const Vec3 k_b = axis_rotation(2, theta_sp) * k_a;
  const double phi_sp = std::atan2(-k_b.y(), k_b.z());
  return euler_to_quat({psi_sp, theta_sp, phi_sp});
}

// --- attitude loop -----------------------------------------------------------

struct ReducedAttitude {
  UnitQuaternion q_red;  // smallest body-frame rotation aligning the k axes
  Vec3 z_q;              // sgn(eta_red) * eps_red
};

// Smallest rotation taking the measured body k axis onto the setpoint body k
// axis, expressed in the measured body frame; yaw plays no part.
inline ReducedAttitude reduced_attitude_error(const UnitQuaternion& q_meas,
                                              const UnitQuaternion& q_sp) {
  const UnitQuaternion q_err = quat_error(q_meas, q_sp);
  const Vec3 k_meas = Vec3::UnitZ();
  const Vec3 k_sp = rotate(q_err, Vec3::UnitZ());
  const double alpha = std::acos(std::clamp(k_meas.dot(k_sp), -1.0, 1.0));
  Vec3 axis = k_meas.cross(k_sp);
  const double axis_norm = axis.norm();
  if (axis_norm > 1e-12) {
    axis /= axis_norm;
  } else {
    // parallel (identity) or antiparallel; any axis orthogonal to k works
    axis = Vec3::UnitX();
  }
  ReducedAttitude out;
  out.q_red.eta = std::cos(0.5 * alpha);
  out.q_red.eps = std::sin(0.5 * alpha) * axis;
  out.z_q = sgn(out.q_red.eta) * out.q_red.eps;
  return out;
}

enum class AttitudeMode {
  kReduced,  // reduced attitude P plus azimuth-rate feedforward (default)
  kFull,     // full-quaternion 2/tau law
};

inline Vec3 reduced_attitude_law(const ReducedAttitude& red, const UnitQuaternion& q_meas,
                                 double psi_rate_sp_ff, const GainSet& g) {
  // feedforward along the Earth k axis resolved in the body frame
  const Vec3 k_e_body = quat_to_rotmat(q_meas) * Vec3::UnitZ();
  return g.K_q.cwiseProduct(red.z_q) + psi_rate_sp_ff * k_e_body;
}

inline Vec3 full_attitude_law(const UnitQuaternion& q_err, const GainSet& g) {
  return (2.0 / g.tau) * sgn(q_err.eta) * q_err.eps;
}

inline Vec3 attitude_controller_unclamped(const UnitQuaternion& q_meas,
                                          const UnitQuaternion& q_sp, double psi_rate_sp_ff,
                                          const GainSet& g,
                                          AttitudeMode mode = AttitudeMode::kReduced) {
  if (mode == AttitudeMode::kFull) {
    return full_attitude_law(quat_error(q_meas, q_sp), g);
  }
  return reduced_attitude_law(reduced_attitude_error(q_meas, q_sp), q_meas, psi_rate_sp_ff, g);
}

inline Vec3 attitude_controller(const UnitQuaternion& q_meas, const UnitQuaternion& q_sp,
                                double psi_rate_sp_ff, const GainSet& g,
                                const ControlLimits& lim,
                                AttitudeMode mode = AttitudeMode::kReduced,
                                bool* clipped = nullptr) {
  return clamp_per_axis(attitude_controller_unclamped(q_meas, q_sp, psi_rate_sp_ff, g, mode),
                        lim.max_rate, clipped);
}

// --- rate loop (PID + rate feedforward) --------------------------------------

inline Vec3 rate_controller_unclamped(const Vec3& omega_sp, const Vec3& omega_meas,
                                      LoopErrors& e, const GainSet& g,
                                      const ControlLimits& lim, double dt) {
  assert(dt > 0.0);
  (void)dt;
  const Vec3 z_w = omega_sp - omega_meas;
  e.z_omega = z_w;
  e.gamma_w += z_w;
  if (lim.integrator_clamp_enabled) {
    e.gamma_w = clamp_per_axis(e.gamma_w, Vec3::Constant(lim.integrator_clamp_w));
  }
  const Vec3 dz = z_w - e.z_w_prev;
  e.z_w_prev = z_w;
  return g.K_wP.cwiseProduct(z_w) + g.K_wI.cwiseProduct(e.gamma_w) +
         g.K_wD.cwiseProduct(dz) + g.K_wff.cwiseProduct(omega_sp);
}

inline Vec3 rate_controller(const Vec3& omega_sp, const Vec3& omega_meas, LoopErrors& e,
                            const GainSet& g, const ControlLimits& lim, double dt,
                            bool* clipped = nullptr) {
  return clamp_per_axis(rate_controller_unclamped(omega_sp, omega_meas, e, g, lim, dt),
                        lim.max_moment, clipped);
}

}  // namespace rcac_autopilot
