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

#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcac_autopilot/geometry.hpp"

namespace rcac_autopilot {

struct Waypoint {
  Vec3 position{Vec3::Zero()};     // m, NED
  double psi{0.0};                 // rad
  double acceptance_radius{0.7};   // m, > 0
  double hold{0.0};                // s inside the radius before advancing
};

struct MissionPlan {
  std::vector<Waypoint> waypoints;
  double takeoff_altitude{5.0};  // m above ground
  double cruise_speed{5.0};      // m/s, used by the feedforward shaping mode
};

// Rectangular 20 m x 15 m circuit at 5 m altitude with 90 degree azimuth
// steps at the corners: takeoff, four corners (the last doubling as the
// return to the start), and a final hold.
inline MissionPlan default_mission() {
  MissionPlan plan;
  plan.takeoff_altitude = 5.0;
  const double z = -5.0;
  const double r = 0.7;
  plan.waypoints = {
      {{0.0, 0.0, z}, 0.0, r, 1.0},             // takeoff
      {{20.0, 0.0, z}, 0.5 * kPi, r, 0.0},      // corner 1
      {{20.0, 15.0, z}, kPi, r, 0.0},           // corner 2
      {{0.0, 15.0, z}, -0.5 * kPi, r, 0.0},     // corner 3
      {{0.0, 0.0, z}, 0.0, r, 0.0},             // corner 4 / return
      {{0.0, 0.0, z}, 0.0, r, 2.0},             // final hold
  };
  return plan;
}

class MissionFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Line-oriented mission file: one waypoint per line as
//   x y z psi radius hold
// (m, m, m, rad, m, s), whitespace separated, '#' starts a comment.
inline MissionPlan parse_mission(std::istream& in, const std::string& name) {
  MissionPlan plan;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    Waypoint wp;
    if (!(fields >> wp.position.x())) continue;  // blank or comment-only line
    if (!(fields >> wp.position.y() >> wp.position.z() >> wp.psi >>
          wp.acceptance_radius >> wp.hold)) {
      throw MissionFileError(name + ":" + std::to_string(lineno) +
                             ": expected `x y z psi radius hold`");
    }
    std::string extra;
    if (fields >> extra) {
      throw MissionFileError(name + ":" + std::to_string(lineno) +
                             ": trailing field `" + extra + "`");
    }
    if (!(wp.acceptance_radius > 0.0)) {
      throw MissionFileError(name + ":" + std::to_string(lineno) +
                             ": acceptance radius must be positive");
    }
    plan.waypoints.push_back(wp);
  }
  if (plan.waypoints.empty()) {
    throw MissionFileError(name + ": no waypoints");
  }
  if (!(plan.waypoints.front().position.z() < 0.0)) {
    throw MissionFileError(name + ": first waypoint must be above ground (z < 0 in NED)");
  }
  plan.takeoff_altitude = -plan.waypoints.front().position.z();
  return plan;
}

inline MissionPlan load_mission(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissionFileError(path + ": cannot open");
  return parse_mission(in, path);
}

// Setpoints handed to the cascade for one sample.
struct SetpointSample {
  Vec3 r_sp{Vec3::Zero()};
  Vec3 v_sp_ff{Vec3::Zero()};
  double psi_sp{0.0};
  double psi_rate_sp_ff{0.0};
  bool advanced{false};  // the active waypoint changed on this sample
};

// Waypoint acceptance state machine. Deterministic function of the sampled
// (t, position) sequence, so metrics replay can re-run it bit-exactly from a
// log. A waypoint is accepted once the vehicle has stayed inside its radius
// for the hold duration; azimuth steps discretely at the switch.
class MissionTracker {
 public:
  explicit MissionTracker(const MissionPlan& plan) : plan_(plan) {
    if (plan_.waypoints.empty()) throw std::invalid_argument("empty mission plan");
    activation_times_.assign(plan_.waypoints.size(), -1.0);
    activation_times_[0] = 0.0;
  }

  SetpointSample update(double t, const Vec3& r_meas) {
    SetpointSample out;
    if (!complete_) {
      const Waypoint& wp = plan_.waypoints[index_];
      const double dist = (r_meas - wp.position).norm();
      if (dist < wp.acceptance_radius) {
        if (!inside_) {
          inside_ = true;
          entered_time_ = t;
        }
        if (t - entered_time_ >= wp.hold) {
          if (index_ + 1 < plan_.waypoints.size()) {
            ++index_;
            activation_times_[index_] = t;
            inside_ = false;
            out.advanced = true;
          } else {
            complete_ = true;
            completion_time_ = t;
          }
        }
      } else {
        inside_ = false;
      }
    }
    const Waypoint& active = plan_.waypoints[index_];
    out.r_sp = active.position;
    out.psi_sp = active.psi;
    return out;
  }

  bool complete() const { return complete_; }
  double completion_time() const { return completion_time_; }
  std::size_t active_index() const { return index_; }
  // -1 for waypoints never activated
  const std::vector<double>& activation_times() const { return activation_times_; }

 private:
  MissionPlan plan_;
  std::size_t index_{0};
  bool inside_{false};
  double entered_time_{0.0};
  bool complete_{false};
  double completion_time_{0.0};
  std::vector<double> activation_times_;
};

// Optional trajectory shaping: a trapezoidal-speed velocity feedforward
// toward the active waypoint and a slewed azimuth setpoint whose slew rate
// feeds the azimuth-rate feedforward. The feedforward fades out around the
// acceptance radius so capture and hold are pure feedback. Kept outside
// MissionTracker so the acceptance logic stays a pure function of position.
class SetpointShaper {
 public:
  SetpointShaper(const MissionPlan& plan, double decel = 2.0, double psi_slew_rate = 1.5)
      : cruise_(plan.cruise_speed), decel_(decel), psi_rate_(psi_slew_rate),
        psi_current_(plan.waypoints.front().psi) {}

  void apply(double t, const Vec3& r_meas, double acceptance_radius, SetpointSample& sp) {
    const double dt = last_t_ >= 0.0 ? t - last_t_ : 0.0;
    last_t_ = t;
    const Vec3 to_wp = sp.r_sp - r_meas;
    const double dist = to_wp.norm();
    if (dist > 1e-6) {
      const double fade = std::clamp(
          (dist / acceptance_radius - 0.5) / 1.5, 0.0, 1.0);
      const double speed = fade * std::min(cruise_, std::sqrt(2.0 * decel_ * dist));
      sp.v_sp_ff = to_wp * (speed / dist);
    }
    const double err = wrap_angle(sp.psi_sp - psi_current_);
    const double max_step = psi_rate_ * dt;
    double rate = 0.0;
    if (std::abs(err) <= max_step) {
      psi_current_ = sp.psi_sp;
    } else {
      const double step = sgn(err) * max_step;
      psi_current_ = wrap_angle(psi_current_ + step);
      rate = sgn(err) * psi_rate_;
    }
    sp.psi_sp = psi_current_;
    sp.psi_rate_sp_ff = rate;
  }

 private:
  double cruise_;
  double decel_;
  double psi_rate_;
  double psi_current_;
  double last_t_{-1.0};
};

}  // namespace rcac_autopilot
