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

#include <array>

#include "rcac_autopilot/control.hpp"
#include "rcac_autopilot/rcac.hpp"

namespace rcac_autopilot {

struct AdaptiveLoopsEnabled {
  bool r{false};
  bool v{false};
  bool q{false};
  bool omega{false};

  static AdaptiveLoopsEnabled all() { return {true, true, true, true}; }
  static AdaptiveLoopsEnabled none() { return {}; }
  bool any() const { return r || v || q || omega; }
};

// Adaptation hyperparameters per loop: initial covariance scale and the sign
// of each loop's control-to-error coupling. Every loop here adds control in
// the direction that reduces its error, so the coupling sign is negative.
struct RcacHyper {
  double p0_r{0.01};
  double p0_v{0.001};
  double p0_q{0.01};
  double p0_omega{0.001};
  double sigma_r{-1.0};
  double sigma_v{-1.0};
  double sigma_q{-1.0};
  double sigma_omega{-1.0};
};

// The cascaded autopilot with retrospective-cost adaptation wrapped around
// all four loops. With every loop disabled the command stream is
// bit-identical to the fixed-gain cascade: the adaptive terms are skipped,
// not added as zeros.
//
// theta layouts: theta_r and theta_q hold one proportional coefficient per
// axis (regressor diag(z)); theta_v holds three [P, I, D] blocks; theta_omega
// holds three [P, I, D, ff] blocks where ff multiplies that axis's rate
// setpoint.
class AdaptiveAutopilot {
 public:
  AdaptiveAutopilot(const GainSet& gains, const ControlLimits& limits,
                    const RcacHyper& hyper = {},
                    const AdaptiveLoopsEnabled& enabled = AdaptiveLoopsEnabled::none(),
                    bool mask_rate_ff = true, AttitudeMode mode = AttitudeMode::kReduced)
      : gains_(gains),
        limits_(limits),
        enabled_(enabled),
        mode_(mode),
        cfg_r_(RcacConfig::make(3, 3, hyper.p0_r, hyper.sigma_r)),
        cfg_v_(RcacConfig::make(3, 9, hyper.p0_v, hyper.sigma_v)),
        cfg_q_(RcacConfig::make(3, 3, hyper.p0_q, hyper.sigma_q)),
        cfg_w_(RcacConfig::make(3, 12, hyper.p0_omega, hyper.sigma_omega)) {
    // flight-test mitigation: pin the axis-1 rate-feedforward coefficient
    if (mask_rate_ff) cfg_w_.mask[3] = true;
    rcac_r_ = RcacState::init(cfg_r_);
    rcac_v_ = RcacState::init(cfg_v_);
    rcac_q_ = RcacState::init(cfg_q_);
    rcac_w_ = RcacState::init(cfg_w_);
  }

  struct PositionOutput {
    Vec3 v_sp{Vec3::Zero()};
    Vec3 f_sp{Vec3::Zero()};
    Vec3 u_r{Vec3::Zero()};
    Vec3 u_v{Vec3::Zero()};
    bool clipped{false};
  };

  // Outer loops (position P+ff, velocity PID), run at the position rate.
  PositionOutput run_position_loops(const Vec3& r_sp, const Vec3& v_sp_ff, const Vec3& r_meas,
                                    const Vec3& v_meas, double dt) {
    PositionOutput out;
    errors_.z_r = r_sp - r_meas;
    Vec3 v = position_controller_unclamped(r_sp, r_meas, v_sp_ff, gains_);
    if (enabled_.r) {
      out.u_r = augment_position(errors_.z_r);
      v += out.u_r;
    }
    bool v_clipped = false;
    out.v_sp = clamp_norm(v, limits_.max_speed, &v_clipped);
    if (enabled_.r && v_clipped) discard_retrospective_sample(rcac_r_);

    Vec3 f = velocity_controller_unclamped(out.v_sp, v_meas, errors_, gains_, limits_, dt);
    if (enabled_.v) {
      out.u_v = augment_velocity(errors_.z_v);
      f += out.u_v;
    }
    bool f_clipped = false;
    out.f_sp = clamp_force_setpoint(f, limits_, &f_clipped);
    if (enabled_.v && f_clipped) discard_retrospective_sample(rcac_v_);
    out.clipped = v_clipped || f_clipped;
    return out;
  }

  struct AttitudeOutput {
    UnitQuaternion q_sp{};
    Vec3 omega_sp{Vec3::Zero()};
    Vec3 moment_sp{Vec3::Zero()};
    Vec3 u_q{Vec3::Zero()};
    Vec3 u_omega{Vec3::Zero()};
    bool clipped{false};
    bool f2q_degenerate{false};
  };

  // Inner loops (f2q, attitude P, body-rate PID+ff), run at the attitude rate.
  AttitudeOutput run_attitude_loops(const Vec3& f_sp, double psi_sp, double psi_rate_sp_ff,
                                    const UnitQuaternion& q_meas, const Vec3& omega_meas,
                                    double dt) {
    AttitudeOutput out;
    out.q_sp = f2q(f_sp, psi_sp, &out.f2q_degenerate);

    const ReducedAttitude red = reduced_attitude_error(q_meas, out.q_sp);
    errors_.z_q = red.z_q;
    Vec3 w = mode_ == AttitudeMode::kFull
                 ? full_attitude_law(quat_error(q_meas, out.q_sp), gains_)
                 : reduced_attitude_law(red, q_meas, psi_rate_sp_ff, gains_);
    if (enabled_.q) {
      out.u_q = augment_attitude(errors_.z_q);
      w += out.u_q;
    }
    bool w_clipped = false;
    out.omega_sp = clamp_per_axis(w, limits_.max_rate, &w_clipped);
    if (enabled_.q && w_clipped) discard_retrospective_sample(rcac_q_);

    Vec3 m = rate_controller_unclamped(out.omega_sp, omega_meas, errors_, gains_, limits_, dt);
    if (enabled_.omega) {
      out.u_omega = augment_rate(errors_.z_omega, out.omega_sp);
      m += out.u_omega;
    }
    bool m_clipped = false;
    out.moment_sp = clamp_per_axis(m, limits_.max_moment, &m_clipped);
    if (enabled_.omega && m_clipped) discard_retrospective_sample(rcac_w_);
    out.clipped = w_clipped || m_clipped;
    return out;
  }

  // Adaptive position term u_r = diag(z_r) theta_r. Consumes z_r as the
  // loop's performance variable, then emits with the updated coefficients.
  Vec3 augment_position(const Vec3& z_r) {
    rls_update(rcac_r_, z_r, cfg_r_);
    const MatX phi = z_r.asDiagonal();
    const VecX u = control_output(phi, rcac_r_.theta);
    rcac_r_.phi_prev = phi;
    rcac_r_.u_prev = u;
    return u;
  }

  // Adaptive velocity term: block-diagonal PID regressor, one row per axis.
  Vec3 augment_velocity(const Vec3& z_v) {
    rls_update(rcac_v_, z_v, cfg_v_);
    MatX phi = MatX::Zero(3, 9);
    for (int i = 0; i < 3; ++i) {
      phi.block(i, 3 * i, 1, 3) = build_pid_regressor(buf_v_[i], 0.0, false);
    }
    const VecX u = control_output(phi, rcac_v_.theta);
    rcac_v_.phi_prev = phi;
    rcac_v_.u_prev = u;
    for (int i = 0; i < 3; ++i) buf_v_[i].push(z_v(i));
    return u;
  }

  // Adaptive attitude term u_q = diag(z_q) theta_q.
  Vec3 augment_attitude(const Vec3& z_q) {
    rls_update(rcac_q_, z_q, cfg_q_);
    const MatX phi = z_q.asDiagonal();
    const VecX u = control_output(phi, rcac_q_.theta);
    rcac_q_.phi_prev = phi;
    rcac_q_.u_prev = u;
    return u;
  }

  // Adaptive rate term: block-diagonal PID rows widened with the axis's rate
  // setpoint as feedforward signal.
  Vec3 augment_rate(const Vec3& z_omega, const Vec3& omega_sp) {
    rls_update(rcac_w_, z_omega, cfg_w_);
    MatX phi = MatX::Zero(3, 12);
    for (int i = 0; i < 3; ++i) {
      phi.block(i, 4 * i, 1, 4) = build_pid_regressor(buf_w_[i], omega_sp(i), true);
    }
    const VecX u = control_output(phi, rcac_w_.theta);
    rcac_w_.phi_prev = phi;
    rcac_w_.u_prev = u;
    for (int i = 0; i < 3; ++i) buf_w_[i].push(z_omega(i));
    return u;
  }

  // When a loop's summed output was clipped, the stored adaptive control
  // never acted on the vehicle, so the pending retrospective pair carries no
  // information; dropping its regressor turns the next update into a no-op.
  static void discard_retrospective_sample(RcacState& state) {
#ifndef RCAC_ADAPT_THROUGH_SATURATION
    state.phi_prev.setZero();
    state.u_prev.setZero();
#else
    (void)state;
#endif
  }

  const GainSet& gains() const { return gains_; }
  const ControlLimits& limits() const { return limits_; }
  const AdaptiveLoopsEnabled& enabled() const { return enabled_; }
  const LoopErrors& errors() const { return errors_; }
  LoopErrors& errors() { return errors_; }
  const RcacState& rcac_r() const { return rcac_r_; }
  const RcacState& rcac_v() const { return rcac_v_; }
  const RcacState& rcac_q() const { return rcac_q_; }
  const RcacState& rcac_omega() const { return rcac_w_; }

 private:
  GainSet gains_;
  ControlLimits limits_;
  AdaptiveLoopsEnabled enabled_;
  AttitudeMode mode_;
  LoopErrors errors_;
  RcacConfig cfg_r_, cfg_v_, cfg_q_, cfg_w_;
  RcacState rcac_r_, rcac_v_, rcac_q_, rcac_w_;
  std::array<PidChannelBuffer, 3> buf_v_{};
  std::array<PidChannelBuffer, 3> buf_w_{};
};

}  // namespace rcac_autopilot
