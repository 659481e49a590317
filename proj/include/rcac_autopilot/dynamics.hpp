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
#include <array>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rcac_autopilot/geometry.hpp"

namespace rcac_autopilot {

// Rigid-body state in a flat-Earth NED world. Position and velocity are
// Earth-frame, the angular rate is body-frame.
struct RigidBodyState {
  Vec3 r{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};
  UnitQuaternion q{};
  Vec3 omega{Vec3::Zero()};

  bool is_finite() const {
    return r.allFinite() && v.allFinite() && q.is_finite() && omega.allFinite();
  }
};

struct VehicleParams {
  double m{2.0};                                    // kg
  Mat3 J{Vec3(0.021, 0.021, 0.036).asDiagonal()};   // kg m^2
  double g{9.81};                                   // m/s^2, +down
  double thrust_max{4.0 * 9.81};                    // N, total
  Vec3 moment_max{1.5, 1.5, 0.3};                   // N m, per axis
  double rotor_arm{0.25};                           // m, hub to rotor
  double rotor_torque_coeff{0.06};                  // m, yaw torque per thrust
};

// Total thrust magnitude along -k_body plus a body-frame moment.
struct ActuatorCommand {
  double thrust{0.0};  // N, >= 0
  Vec3 moment{Vec3::Zero()};

  bool is_finite() const { return std::isfinite(thrust) && moment.allFinite(); }
};

struct MixerResult {
  double thrust{0.0};
  Vec3 moment{Vec3::Zero()};
  std::array<double, 4> rotor_thrusts{};
  bool saturated{false};
};

// Thrown when integration produces a non-finite state.
class SimulationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Earth-frame acceleration: gravity plus the body -z thrust resolved through
// the current attitude.
inline Vec3 translational_deriv(const RigidBodyState& state, double achieved_thrust,
                                const VehicleParams& p) {
  const Vec3 thrust_body(0.0, 0.0, -achieved_thrust);
  return Vec3(0.0, 0.0, p.g) + rotate(state.q, thrust_body) / p.m;
}

// Body-frame angular acceleration J^{-1} (M - omega x J omega).
inline Vec3 rotational_deriv(const RigidBodyState& state, const Vec3& moment,
                             const VehicleParams& p) {
  const Vec3 gyro = state.omega.cross(p.J * state.omega);
  return p.J.inverse() * (moment - gyro);
}

// Quaternion kinematics qdot = 1/2 q (x) (0, omega); returned as
// (eta_dot, eps_dot). Exact integration keeps the norm stationary.
inline Eigen::Vector4d attitude_deriv(const RigidBodyState& state) {
  const UnitQuaternion& q = state.q;
  const Vec3& w = state.omega;
  Eigen::Vector4d qdot;
  qdot(0) = -0.5 * q.eps.dot(w);
  qdot.tail<3>() = 0.5 * (q.eta * w + q.eps.cross(w));
  return qdot;
}

// Allocates the commanded wrench to four rotors in a symmetric X layout and
// clamps each rotor to [0, thrust_max/4]. Rotor numbering: 0 front-right,
// 1 rear-left, 2 front-left, 3 rear-right; 0 and 1 produce +yaw drag torque.
// The achieved wrench is recomputed from the clamped rotor thrusts, so
// unsaturated commands pass through exactly.
inline MixerResult mixer(const ActuatorCommand& cmd, const VehicleParams& p) {
  const double d = p.rotor_arm / std::sqrt(2.0);
  const double c = p.rotor_torque_coeff;
  const double t4 = 0.25 * cmd.thrust;
  const double mx = cmd.moment.x() / (4.0 * d);
  const double my = cmd.moment.y() / (4.0 * d);
  const double mz = cmd.moment.z() / (4.0 * c);
  std::array<double, 4> rotor{t4 - mx + my + mz,
                              t4 + mx - my + mz,
                              t4 + mx + my - mz,
                              t4 - mx - my - mz};
  const double cap = p.thrust_max / 4.0;
  MixerResult out;
  for (double& t : rotor) {
    const double clamped = std::clamp(t, 0.0, cap);
    out.saturated = out.saturated || clamped != t;
    t = clamped;
  }
  out.rotor_thrusts = rotor;
  out.thrust = rotor[0] + rotor[1] + rotor[2] + rotor[3];
  out.moment = Vec3(d * (-rotor[0] + rotor[1] + rotor[2] - rotor[3]),
                    d * (rotor[0] - rotor[1] + rotor[2] - rotor[3]),
                    c * (rotor[0] + rotor[1] - rotor[2] - rotor[3]));
  return out;
}

namespace detail {

struct StateDeriv {
  Vec3 rdot;
  Vec3 vdot;
  Eigen::Vector4d qdot;
  Vec3 wdot;
};

inline StateDeriv eval_deriv(const RigidBodyState& s, double thrust, const Vec3& moment,
                             const VehicleParams& p) {
  return StateDeriv{s.v, translational_deriv(s, thrust, p), attitude_deriv(s),
                    rotational_deriv(s, moment, p)};
}

// s + h * d, without renormalizing the quaternion (RK4 stage value).
inline RigidBodyState advance(const RigidBodyState& s, const StateDeriv& d, double h) {
  RigidBodyState out;
  out.r = s.r + h * d.rdot;
  out.v = s.v + h * d.vdot;
  out.q.eta = s.q.eta + h * d.qdot(0);
  out.q.eps = s.q.eps + h * d.qdot.tail<3>();
  out.omega = s.omega + h * d.wdot;
  return out;
}

}  // namespace detail

// One classical RK4 step through the mixer; the command is held constant over
// the step and the output quaternion is renormalized.
inline RigidBodyState step(const RigidBodyState& state, const ActuatorCommand& cmd,
                           double dt, const VehicleParams& p) {
  assert(dt > 0.0);
  const MixerResult mix = mixer(cmd, p);
  const double T = mix.thrust;
  const Vec3& M = mix.moment;

  const detail::StateDeriv k1 = detail::eval_deriv(state, T, M, p);
  const detail::StateDeriv k2 = detail::eval_deriv(detail::advance(state, k1, 0.5 * dt), T, M, p);
  const detail::StateDeriv k3 = detail::eval_deriv(detail::advance(state, k2, 0.5 * dt), T, M, p);
  const detail::StateDeriv k4 = detail::eval_deriv(detail::advance(state, k3, dt), T, M, p);

  RigidBodyState out;
  const double h6 = dt / 6.0;
  out.r = state.r + h6 * (k1.rdot + 2.0 * k2.rdot + 2.0 * k3.rdot + k4.rdot);
  out.v = state.v + h6 * (k1.vdot + 2.0 * k2.vdot + 2.0 * k3.vdot + k4.vdot);
  const Eigen::Vector4d qsum = k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot;
  out.q.eta = state.q.eta + h6 * qsum(0);
  out.q.eps = state.q.eps + h6 * qsum.tail<3>();
  out.omega = state.omega + h6 * (k1.wdot + 2.0 * k2.wdot + 2.0 * k3.wdot + k4.wdot);

  if (!out.is_finite()) {
    std::ostringstream msg;
    msg << "integration produced a non-finite state (r=[" << out.r.transpose()
        << "] v=[" << out.v.transpose() << "] omega=[" << out.omega.transpose() << "])";
    throw SimulationDiverged(msg.str());
  }
  out.q = out.q.normalized();
  return out;
}

}  // namespace rcac_autopilot
