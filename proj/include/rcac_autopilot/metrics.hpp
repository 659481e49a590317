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

#include <cmath>
#include <string>
#include <vector>

#include "rcac_autopilot/mission.hpp"
#include "rcac_autopilot/telemetry.hpp"

namespace rcac_autopilot {

struct MetricsReport {
  double position_rmse{0.0};             // m, cross-track against the active leg
  double azimuth_rmse{0.0};              // rad, wrapped
  std::vector<double> segment_overshoot; // m, per waypoint, excursion past it
  double max_overshoot{0.0};             // m
  double completion_time{0.0};           // s; log end when incomplete
  bool completed{false};
  double terminal_theta_r_norm{0.0};
  double terminal_theta_v_norm{0.0};
  double terminal_theta_q_norm{0.0};
  double terminal_theta_omega_norm{0.0};
};

namespace detail {

// Distance from a point to the segment ab (degenerate segments collapse to
// point distance).
inline double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len_sq = ab.squaredNorm();
  if (len_sq < 1e-18) return (p - b).norm();
  const double s = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace detail

// Everything here is a deterministic function of the log rows and the plan,
// so recomputing from a written CSV reproduces the original report exactly.
// Completion is recovered by re-running the waypoint acceptance state
// machine over the logged samples.
//
// Position RMSE is the cross-track error against the active mission leg (the
// segment from the previous waypoint to the active one; plain distance for
// the first waypoint), which measures how tightly the flown trace follows
// the commanded path independent of where along the leg the vehicle is.
inline MetricsReport compute_metrics(const SimulationLog& log, const MissionPlan& plan) {
  MetricsReport rep;
  if (log.empty()) return rep;

  MissionTracker tracker(plan);
  double pos_sq = 0.0;
  double azi_sq = 0.0;
  // the first leg is the climb line from the ground point below the takeoff
  // waypoint
  const Vec3 ground = plan.waypoints[0].position.cwiseProduct(Vec3(1.0, 1.0, 0.0));
  for (const LogRecord& rec : log) {
    tracker.update(rec.t, rec.r_meas);
    const std::size_t j = tracker.active_index();
    const Vec3& leg_start = j == 0 ? ground : plan.waypoints[j - 1].position;
    const double cross_track =
        detail::segment_distance(rec.r_meas, leg_start, plan.waypoints[j].position);
    pos_sq += cross_track * cross_track;
    const double dpsi = wrap_angle(euler_from_quat(rec.q).psi - euler_from_quat(rec.q_sp).psi);
    azi_sq += dpsi * dpsi;
  }
  const double n = static_cast<double>(log.size());
  rep.position_rmse = std::sqrt(pos_sq / n);
  rep.azimuth_rmse = std::sqrt(azi_sq / n);
  rep.completed = tracker.complete();
  rep.completion_time = rep.completed ? tracker.completion_time() : log.back().t;

  // Overshoot past waypoint j: max projection of (r - wp_j) onto the incoming
  // leg direction while j is active and during the following segment, where
  // the fly-past after acceptance shows up.
  const auto& act = tracker.activation_times();
  const std::size_t n_wp = plan.waypoints.size();
  rep.segment_overshoot.assign(n_wp, 0.0);
  auto window_end = [&](std::size_t j) {
    return (j + 2 < n_wp && act[j + 2] >= 0.0) ? act[j + 2] : log.back().t;
  };
  for (std::size_t j = 1; j < n_wp; ++j) {
    if (act[j] < 0.0) continue;  // never reached
    const Vec3 leg = plan.waypoints[j].position - plan.waypoints[j - 1].position;
    const double leg_len = leg.norm();
    if (leg_len < 1e-9) continue;  // duplicate waypoint, no approach direction
    const Vec3 dir = leg / leg_len;
    const double t_end = window_end(j);
    double worst = 0.0;
    for (const LogRecord& rec : log) {
      if (rec.t < act[j]) continue;
      if (rec.t > t_end) break;
      worst = std::max(worst, (rec.r_meas - plan.waypoints[j].position).dot(dir));
    }
    rep.segment_overshoot[j] = worst;
    rep.max_overshoot = std::max(rep.max_overshoot, worst);
  }
  return rep;
}

inline void attach_gain_norms(MetricsReport& rep, const GainLog& gains) {
  if (gains.empty()) return;
  const GainRecord& last = gains.back();
  auto norm = [](const auto& arr) {
    double s = 0.0;
    for (double x : arr) s += x * x;
    return std::sqrt(s);
  };
  rep.terminal_theta_r_norm = norm(last.theta_r);
  rep.terminal_theta_v_norm = norm(last.theta_v);
  rep.terminal_theta_q_norm = norm(last.theta_q);
  rep.terminal_theta_omega_norm = norm(last.theta_omega);
}

// Canonical metrics.txt serialization; replay must reproduce it byte for byte.
inline std::string metrics_to_text(const MetricsReport& rep) {
  std::string out;
  out += "completed = ";
  out += rep.completed ? "true" : "false";
  out += '\n';
  out += "completion_time = " + format_double(rep.completion_time) + '\n';
  out += "position_rmse = " + format_double(rep.position_rmse) + '\n';
  out += "azimuth_rmse = " + format_double(rep.azimuth_rmse) + '\n';
  out += "max_overshoot = " + format_double(rep.max_overshoot) + '\n';
  for (std::size_t j = 0; j < rep.segment_overshoot.size(); ++j) {
    out += "segment_overshoot_" + std::to_string(j) + " = " +
           format_double(rep.segment_overshoot[j]) + '\n';
  }
  out += "terminal_theta_r_norm = " + format_double(rep.terminal_theta_r_norm) + '\n';
  out += "terminal_theta_v_norm = " + format_double(rep.terminal_theta_v_norm) + '\n';
  out += "terminal_theta_q_norm = " + format_double(rep.terminal_theta_q_norm) + '\n';
  out += "terminal_theta_omega_norm = " + format_double(rep.terminal_theta_omega_norm) + '\n';
  return out;
}

}  // namespace rcac_autopilot
