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

#include "rcac_autopilot/geometry.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace rcac_autopilot {
namespace {

using test::random_euler;
using test::random_unit_quat;
using test::random_vec3;

// Brute-force Hamilton product through the 4x4 left-multiplication matrix;
// independent of the quat_multiply implementation.
Eigen::Vector4d hamilton_table(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  Eigen::Matrix4d l;
  l << a(0), -a(1), -a(2), -a(3),
       a(1),  a(0), -a(3),  a(2),
       a(2),  a(3),  a(0), -a(1),
       a(3), -a(2),  a(1),  a(0);
  return l * b;
}

Eigen::Vector4d as_vec4(const UnitQuaternion& q) {
  return Eigen::Vector4d(q.eta, q.eps.x(), q.eps.y(), q.eps.z());
}

TEST(EulerToQuat, Identity) {
  const UnitQuaternion q = euler_to_quat({0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(q.eta, 1.0);
  EXPECT_DOUBLE_EQ(q.eps.norm(), 0.0);
}

TEST(EulerToQuat, PureYaw) {
  const UnitQuaternion q = euler_to_quat({kPi / 2.0, 0.0, 0.0});
  EXPECT_NEAR(q.eta, std::cos(kPi / 4.0), 1e-15);
  EXPECT_NEAR(q.eps.x(), 0.0, 1e-15);
  EXPECT_NEAR(q.eps.y(), 0.0, 1e-15);
  EXPECT_NEAR(q.eps.z(), std::sin(kPi / 4.0), 1e-15);
}

TEST(EulerToQuat, FrozenArbitraryAngles) {
  // independent evaluation of the four trigonometric products at 60-digit
  // precision, rounded to the nearest doubles
  const UnitQuaternion q = euler_to_quat({0.3, -0.2, 0.1});
  EXPECT_NEAR(q.eta, 0.981856172866081, 1e-15);
  EXPECT_NEAR(q.eps.x(), 0.06407134770607116, 1e-15);
  EXPECT_NEAR(q.eps.y(), -0.09115754934299071, 1e-15);
  EXPECT_NEAR(q.eps.z(), 0.15343930202422257, 1e-15);
}

TEST(EulerToQuat, AlwaysUnitNorm) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaternion q = euler_to_quat(random_euler(rng));
    EXPECT_NEAR(q.norm(), 1.0, 1e-12);
  }
}

TEST(QuatError, IdenticalInputsGiveIdentity) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion q = random_unit_quat(rng);
    const UnitQuaternion e = quat_error(q, q);
    EXPECT_NEAR(std::abs(e.eta), 1.0, 1e-12);
    EXPECT_NEAR(e.eps.norm(), 0.0, 1e-12);
  }
}

TEST(QuatError, IdentityMeasurementReturnsSetpoint) {
  std::mt19937_64 rng(9);
  const UnitQuaternion q_sp = random_unit_quat(rng);
  const UnitQuaternion e = quat_error(UnitQuaternion{}, q_sp);
  EXPECT_NEAR(e.eta, q_sp.eta, 1e-15);
  EXPECT_NEAR((e.eps - q_sp.eps).norm(), 0.0, 1e-15);
}

TEST(QuatError, MatchesBruteForceHamiltonProduct) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    const UnitQuaternion a = random_unit_quat(rng);
    const UnitQuaternion b = random_unit_quat(rng);
    const Eigen::Vector4d expected =
        hamilton_table(as_vec4(a.conjugate()), as_vec4(b));
    const UnitQuaternion got = quat_error(a, b);
    EXPECT_NEAR((as_vec4(got) - expected).norm(), 0.0, 1e-12);
  }
}

TEST(QuatToRotmat, IdentityQuaternion) {
  EXPECT_NEAR((quat_to_rotmat(UnitQuaternion{}) - Mat3::Identity()).norm(), 0.0, 1e-15);
}

TEST(QuatToRotmat, PureYawMatchesAxisRotation) {
  const UnitQuaternion q = euler_to_quat({kPi / 2.0, 0.0, 0.0});
  EXPECT_NEAR((quat_to_rotmat(q) - axis_rotation(3, kPi / 2.0)).norm(), 0.0, 1e-12);
}

TEST(QuatToRotmat, RoundTripRecoversQuaternionUpToSign) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaternion q = random_unit_quat(rng);
    const UnitQuaternion back = quat_from_rotmat(quat_to_rotmat(q));
    const double same = (as_vec4(back) - as_vec4(q)).norm();
    const double flipped = (as_vec4(back) + as_vec4(q)).norm();
    EXPECT_LT(std::min(same, flipped), 1e-9);
  }
}

TEST(QuatToRotmat, MatchesEulerComposition) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const EulerAngles321 e = random_euler(rng);
    const Mat3 composed =
        axis_rotation(1, e.phi) * axis_rotation(2, e.theta) * axis_rotation(3, e.psi);
    EXPECT_NEAR((quat_to_rotmat(euler_to_quat(e)) - composed).norm(), 0.0, 1e-9);
  }
}

TEST(QuatToRotmat, OrthogonalWithUnitDeterminant) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    const RotationMatrix r = quat_to_rotmat(random_unit_quat(rng));
    EXPECT_NEAR((r * r.transpose() - Mat3::Identity()).norm(), 0.0, 1e-9);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-9);
  }
}

TEST(EulerFromQuat, InvertsEulerToQuat) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 500; ++i) {
    const EulerAngles321 e = random_euler(rng);
    const EulerAngles321 back = euler_from_quat(euler_to_quat(e));
    EXPECT_NEAR(wrap_angle(back.psi - e.psi), 0.0, 1e-9);
    EXPECT_NEAR(back.theta - e.theta, 0.0, 1e-9);
    EXPECT_NEAR(wrap_angle(back.phi - e.phi), 0.0, 1e-9);
  }
}

TEST(AxisRotation, ZeroAngleIsIdentity) {
  EXPECT_NEAR((axis_rotation(3, 0.0) - Mat3::Identity()).norm(), 0.0, 1e-15);
}

TEST(AxisRotation, YawQuarterTurnOnBasisVector) {
  // symbolic expansion: a north-pointing vector resolves to -j in a frame
  // rotated +90 degrees about k
  const Vec3 got = axis_rotation(3, kPi / 2.0) * Vec3::UnitX();
  EXPECT_NEAR(got.x(), std::cos(kPi / 2.0), 1e-15);
  EXPECT_NEAR(got.y(), -1.0, 1e-15);
  EXPECT_NEAR(got.z(), 0.0, 1e-15);
}

TEST(AxisRotation, InverseRotationCancels) {
  const double theta = 0.7331;
  EXPECT_NEAR((axis_rotation(2, theta) * axis_rotation(2, -theta) - Mat3::Identity()).norm(),
              0.0, 1e-12);
}

TEST(AxisRotation, RejectsBadAxis) {
  EXPECT_THROW(axis_rotation(0, 1.0), std::invalid_argument);
  EXPECT_THROW(axis_rotation(4, 1.0), std::invalid_argument);
}

TEST(CrossMatrix, ZeroVectorGivesZeroMatrix) {
  EXPECT_EQ(cross_matrix(Vec3::Zero()).norm(), 0.0);
}

TEST(CrossMatrix, BasisIdentity) {
  const Vec3 got = cross_matrix(Vec3::UnitX()) * Vec3::UnitY();
  EXPECT_EQ(got.x(), 0.0);
  EXPECT_EQ(got.y(), 0.0);
  EXPECT_EQ(got.z(), 1.0);
}

TEST(CrossMatrix, MatchesComponentwiseCrossProduct) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = random_vec3(rng, 10.0);
    const Vec3 w = random_vec3(rng, 10.0);
    const Vec3 expected(v.y() * w.z() - v.z() * w.y(), v.z() * w.x() - v.x() * w.z(),
                        v.x() * w.y() - v.y() * w.x());
    EXPECT_NEAR((cross_matrix(v) * w - expected).norm(), 0.0, 1e-12);
  }
}

TEST(CrossMatrix, ExactBitwiseSkewSymmetry) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 100; ++i) {
    const Mat3 m = cross_matrix(random_vec3(rng, 100.0));
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        EXPECT_EQ(m(r, c), -m(c, r));
      }
    }
  }
}

TEST(WrapAngle, PrincipalRange) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(-0.5), -0.5, 0.0);
}

TEST(Sgn, ZeroIsPositive) {
  EXPECT_EQ(sgn(0.0), 1.0);
  EXPECT_EQ(sgn(-0.25), -1.0);
  EXPECT_EQ(sgn(0.25), 1.0);
}

TEST(Rotate, AgreesWithTransposedDcm) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const UnitQuaternion q = random_unit_quat(rng);
    const Vec3 v = random_vec3(rng, 5.0);
    EXPECT_NEAR((rotate(q, v) - quat_to_rotmat(q).transpose() * v).norm(), 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace rcac_autopilot
