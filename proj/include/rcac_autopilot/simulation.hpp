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

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "rcac_autopilot/adaptive.hpp"
#include "rcac_autopilot/dynamics.hpp"
#include "rcac_autopilot/metrics.hpp"
#include "rcac_autopilot/mission.hpp"
#include "rcac_autopilot/telemetry.hpp"

namespace rcac_autopilot {

// One closed-loop experiment: physics at 1/dt, position/velocity loops and
// attitude/rate loops on decimated schedules, fixed-gain or adaptive mode.
struct ExperimentConfig {
  double alpha_p{1.0};
  bool adaptive{false};
  AdaptiveLoopsEnabled loops{AdaptiveLoopsEnabled::all()};  // effective only when adaptive
  RcacHyper hyper{};
  bool mask_rate_ff{true};
  AttitudeMode attitude_mode{AttitudeMode::kReduced};
  bool shaped_feedforward{false};  // trapezoidal v_sp_ff and slewed azimuth
  double dt{0.002};
  double duration_cap{180.0};
  std::uint64_t seed{0};
  bool initial_state_jitter{false};
  GainSet gains{};
  VehicleParams vehicle{};
  ControlLimits limits{};
  int position_loop_divisor{10};  // 50 Hz at the 500 Hz default physics rate
  int attitude_loop_divisor{2};   // 250 Hz
};

struct ExperimentResult {
  SimulationLog log;
  GainLog gain_log;
  MetricsReport metrics;
  bool aborted{false};
  std::string abort_reason;
  long n_ticks{0};
  long n_position_updates{0};
  long n_attitude_updates{0};
};

inline void validate(const ExperimentConfig& cfg) {
  if (!(cfg.alpha_p > 0.0)) throw std::invalid_argument("alpha_p must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.duration_cap > 0.0)) throw std::invalid_argument("duration cap must be positive");
  if (cfg.position_loop_divisor <= 0 || cfg.attitude_loop_divisor <= 0) {
    throw std::invalid_argument("loop divisors must be positive");
  }
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const MissionPlan& plan) {
  validate(cfg);
  ExperimentResult res;

  ControlLimits limits = cfg.limits;
  limits.hover_thrust = cfg.vehicle.m * cfg.vehicle.g;
  const GainSet gains = detune(cfg.gains, cfg.alpha_p);
  const AdaptiveLoopsEnabled enabled =
      cfg.adaptive ? cfg.loops : AdaptiveLoopsEnabled::none();
  AdaptiveAutopilot autopilot(gains, limits, cfg.hyper, enabled, cfg.mask_rate_ff,
                              cfg.attitude_mode);

  RigidBodyState state;
  if (cfg.initial_state_jitter) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    state.r = Vec3(0.05 * u(rng), 0.05 * u(rng), 0.0);
    state.q = euler_to_quat({0.05 * u(rng), 0.0, 0.0});
  }

  MissionTracker tracker(plan);
  SetpointShaper shaper(plan);

  AdaptiveAutopilot::PositionOutput pos;
  AdaptiveAutopilot::AttitudeOutput att;
  SetpointChain sp;
  sp.f_sp = Vec3(0.0, 0.0, -limits.hover_thrust);

  const double loop_dt_pos = cfg.dt * cfg.position_loop_divisor;
  const double loop_dt_att = cfg.dt * cfg.attitude_loop_divisor;

  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (t >= cfg.duration_cap) break;
    ++res.n_ticks;

    SetpointSample mission_sp = tracker.update(t, state.r);
    if (cfg.shaped_feedforward) {
      shaper.apply(t, state.r,
                   plan.waypoints[tracker.active_index()].acceptance_radius, mission_sp);
    }
    sp.r_sp = mission_sp.r_sp;
    sp.v_sp_ff = mission_sp.v_sp_ff;
    sp.psi_sp = mission_sp.psi_sp;
    sp.psi_rate_sp_ff = mission_sp.psi_rate_sp_ff;

    bool controller_clipped = false;
    if (k % cfg.position_loop_divisor == 0) {
      pos = autopilot.run_position_loops(sp.r_sp, sp.v_sp_ff, state.r, state.v, loop_dt_pos);
      sp.v_sp = pos.v_sp;
      sp.f_sp = pos.f_sp;
      controller_clipped = controller_clipped || pos.clipped;
      ++res.n_position_updates;
    }
    if (k % cfg.attitude_loop_divisor == 0) {
      att = autopilot.run_attitude_loops(sp.f_sp, sp.psi_sp, sp.psi_rate_sp_ff, state.q,
                                         state.omega, loop_dt_att);
      sp.q_sp = att.q_sp;
      sp.omega_sp = att.omega_sp;
      sp.moment_sp = att.moment_sp;
      controller_clipped = controller_clipped || att.clipped;
      ++res.n_attitude_updates;
    }

    const ActuatorCommand cmd{sp.f_sp.norm(), sp.moment_sp};
    if (!cmd.is_finite()) {
      res.aborted = true;
      res.abort_reason = "non-finite actuator command at t = " + format_double(t);
      break;
    }
    const MixerResult mix = mixer(cmd, cfg.vehicle);

    LogRecord rec;
    rec.t = t;
    rec.r_meas = state.r;
    rec.r_sp = sp.r_sp;
    rec.v_meas = state.v;
    rec.v_sp = sp.v_sp;
    rec.q = state.q;
    rec.q_sp = sp.q_sp;
    rec.omega = state.omega;
    rec.omega_sp = sp.omega_sp;
    rec.f_sp = sp.f_sp;
    rec.moment_sp = sp.moment_sp;
    rec.u_r = pos.u_r;
    rec.u_v = pos.u_v;
    rec.u_q = att.u_q;
    rec.u_omega = att.u_omega;
    rec.thrust_achieved = mix.thrust;
    rec.saturated = mix.saturated || controller_clipped;
    res.log.push_back(rec);

    GainRecord grec;
    grec.t = t;
    const auto copy_theta = [](const VecX& theta, auto& arr) {
      for (std::size_t i = 0; i < arr.size(); ++i) arr[i] = theta(static_cast<Eigen::Index>(i));
    };
    copy_theta(autopilot.rcac_r().theta, grec.theta_r);
    copy_theta(autopilot.rcac_v().theta, grec.theta_v);
    copy_theta(autopilot.rcac_q().theta, grec.theta_q);
    copy_theta(autopilot.rcac_omega().theta, grec.theta_omega);
    res.gain_log.push_back(grec);

    if (tracker.complete()) break;

    try {
      state = step(state, cmd, cfg.dt, cfg.vehicle);
    } catch (const SimulationDiverged& e) {
      res.aborted = true;
      res.abort_reason = e.what();
      break;
    }
  }

  res.metrics = compute_metrics(res.log, plan);
  attach_gain_norms(res.metrics, res.gain_log);
  return res;
}

}  // namespace rcac_autopilot
