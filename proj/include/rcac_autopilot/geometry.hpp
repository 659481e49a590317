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

#include <Eigen/Dense>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rcac_autopilot {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Direction cosine matrix: orthogonal, det +1. A RotationMatrix produced by
// quat_to_rotmat or axis_rotation resolves Earth-frame components into the
// rotated frame (x|_body = O * x|_earth).
using RotationMatrix = Mat3;

inline constexpr double kPi = std::numbers::pi;

// sgn(0) := +1 everywhere in this codebase.
inline double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double x) {
  return x - 2.0 * kPi * std::ceil((x - kPi) / (2.0 * kPi));
}

// 3-2-1 Euler angles: azimuth (yaw), elevation (pitch), bank (roll).
struct EulerAngles321 {
  double psi{0.0};
  double theta{0.0};
  double phi{0.0};
};

// Scalar-first unit quaternion with Hamilton product convention.
//
// A quaternion here represents the attitude of the body frame relative to
// the Earth frame (the passive frame rotation): rotate(q, v) maps a
// body-resolved vector to its Earth-resolved components, and
// quat_to_rotmat(q) is the Earth-to-body direction cosine matrix, so the
// two views stay consistent (quat_to_rotmat(q) * x|_E == x|_Q).
struct UnitQuaternion {
  double eta{1.0};
  Vec3 eps{Vec3::Zero()};

  double norm() const { return std::sqrt(eta * eta + eps.squaredNorm()); }

  UnitQuaternion normalized() const {
    const double n = norm();
    assert(n > 0.0);
    return UnitQuaternion{eta / n, eps / n};
  }

  UnitQuaternion conjugate() const { return UnitQuaternion{eta, -eps}; }

  bool is_finite() const {
    return std::isfinite(eta) && eps.allFinite();
  }
};

inline UnitQuaternion quat_inverse(const UnitQuaternion& q) {
  return q.conjugate();
}

namespace detail {
// Debug-build invariant: quaternions fed to constructive operations must not
// have drifted more than 1e-9 from unit norm before renormalization.
inline void check_near_unit(const UnitQuaternion& q) {
  (void)q;
  assert(std::abs(q.norm() - 1.0) <= 1e-9 && "quaternion norm drift");
}
}  // namespace detail

// Hamilton product a (x) b, renormalized.
inline UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b) {
  detail::check_near_unit(a);
  detail::check_near_unit(b);
  UnitQuaternion out;
  out.eta = a.eta * b.eta - a.eps.dot(b.eps);
  out.eps = a.eta * b.eps + b.eta * a.eps + a.eps.cross(b.eps);
  return out.normalized();
}

// Attitude error q_tilde = q_meas^{-1} (x) q_sp.
inline UnitQuaternion quat_error(const UnitQuaternion& q_meas, const UnitQuaternion& q_sp) {
  return quat_multiply(quat_inverse(q_meas), q_sp);
}

// Rotates a body-resolved vector into Earth components.
inline Vec3 rotate(const UnitQuaternion& q, const Vec3& v) {
  return v + 2.0 * q.eps.cross(q.eps.cross(v) + q.eta * v);
}

// Earth-to-body direction cosine matrix of q. For q built from 3-2-1 Euler
// angles this equals axis_rotation(1, phi) * axis_rotation(2, theta) *
// axis_rotation(3, psi).
inline RotationMatrix quat_to_rotmat(const UnitQuaternion& q) {
  detail::check_near_unit(q);
  const Mat3 ex = (Mat3() << 0.0, -q.eps.z(), q.eps.y(),
                             q.eps.z(), 0.0, -q.eps.x(),
                             -q.eps.y(), q.eps.x(), 0.0).finished();
  // active (body-to-Earth) matrix, then transpose
  const Mat3 r = Mat3::Identity() + 2.0 * q.eta * ex + 2.0 * ex * ex;
  return r.transpose();
}

// Shepperd's method on the body-to-Earth matrix.
inline UnitQuaternion quat_from_rotmat(const RotationMatrix& dcm) {
  const Mat3 r = dcm.transpose();
  UnitQuaternion q;
  const double tr = r.trace();
  if (tr > 0.0) {
    const double s = 2.0 * std::sqrt(tr + 1.0);
    q.eta = 0.25 * s;
    q.eps = Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q.eta = (r(2, 1) - r(1, 2)) / s;
    q.eps = Vec3(0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s);
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q.eta = (r(0, 2) - r(2, 0)) / s;
    q.eps = Vec3((r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s);
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q.eta = (r(1, 0) - r(0, 1)) / s;
    q.eps = Vec3((r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s);
  }
  return q.normalized();
}

// Quaternion of the 3-2-1 rotation sequence (azimuth, elevation, bank).
inline UnitQuaternion euler_to_quat(const EulerAngles321& e) {
  const double cps = std::cos(0.5 * e.psi), sps = std::sin(0.5 * e.psi);
  const double cth = std::cos(0.5 * e.theta), sth = std::sin(0.5 * e.theta);
  const double cph = std::cos(0.5 * e.phi), sph = std::sin(0.5 * e.phi);
  UnitQuaternion q;
  q.eta = cph * cth * cps + sph * sth * sps;
  q.eps.x() = -cph * sth * sps + sph * cth * cps;
  q.eps.y() = cph * sth * cps + sph * cth * sps;
  q.eps.z() = cph * cth * sps - sph * sth * cps;
  return q.normalized();
}

// 3-2-1 extraction, two-argument arctangent throughout.
inline EulerAngles321 euler_from_quat(const UnitQuaternion& q) {
  const RotationMatrix o = quat_to_rotmat(q);
  EulerAngles321 e;
  e.psi = std::atan2(o(0, 1), o(0, 0));
  e.theta = std::asin(std::clamp(-o(0, 2), -1.0, 1.0));
  e.phi = std::atan2(o(1, 2), o(2, 2));
  return e;
}

// Single-axis direction cosine matrix about the given body axis (1, 2 or 3).
inline RotationMatrix axis_rotation(int axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  RotationMatrix o = RotationMatrix::Identity();
  switch (axis) {
    case 1:
      o(1, 1) = c; o(1, 2) = s;
      o(2, 1) = -s; o(2, 2) = c;
      break;
    case 2:
      o(0, 0) = c; o(0, 2) = -s;
      o(2, 0) = s; o(2, 2) = c;
      break;
    case 3:
      o(0, 0) = c; o(0, 1) = s;
      o(1, 0) = -s; o(1, 1) = c;
      break;
    default:
      throw std::invalid_argument("axis_rotation: axis must be 1, 2 or 3");
  }
  return o;
}

// Skew-symmetric cross-product matrix: cross_matrix(v) * w == v x w.
inline Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m(0, 0) = 0.0;     m(0, 1) = -v.z();  m(0, 2) = v.y();
  m(1, 0) = v.z();   m(1, 1) = 0.0;     m(1, 2) = -v.x();
  m(2, 0) = -v.y();  m(2, 1) = v.x();   m(2, 2) = 0.0;
  return m;
}

}  // namespace rcac_autopilot
