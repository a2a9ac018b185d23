// Copyright 2026 The radlio Authors
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

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace radlio {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;

/// Error-state vector. Block order is fixed repo-wide:
/// [dtheta, dv, dp, dbg, dba], each 3 long.
using Tangent15 = Vec15;

namespace idx {
inline constexpr int kRot = 0;
inline constexpr int kVel = 3;
inline constexpr int kPos = 6;
inline constexpr int kBg = 9;
inline constexpr int kBa = 12;
}  // namespace idx

/// Rotation matrices are plain Eigen 3x3; is_rotation() checks the invariants.
using Rot3 = Mat3;

bool is_rotation(const Mat3& R, double tol = 1e-9);

Mat3 skew(const Vec3& v);

/// Rodrigues exponential. Uses a second-order Taylor expansion below 1e-5 rad.
Rot3 so3_exp(const Vec3& phi);

struct So3Log {
  Vec3 phi;
  /// Set when the angle is within 1e-6 of pi; the axis sign is then arbitrary
  /// and the result carries reduced precision.
  bool reduced_precision = false;
};

/// Principal logarithm, |result| <= pi. Near pi the axis is recovered from the
/// symmetric part of R instead of the (vanishing) skew part.
So3Log so3_log_checked(const Rot3& R);
Vec3 so3_log(const Rot3& R);

Mat3 so3_left_jacobian(const Vec3& phi);
Mat3 so3_left_jacobian_inv(const Vec3& phi);
Mat3 so3_right_jacobian(const Vec3& phi);

/// Extended pose: rotation, velocity and position packed as the 5x5 matrix
///   [ R v p ]
///   [ 0 1 0 ]
///   [ 0 0 1 ]
struct SE23 {
  Rot3 R = Rot3::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 p = Vec3::Zero();

  static SE23 identity() { return {}; }
  SE23 inverse() const;
  Eigen::Matrix<double, 5, 5> matrix() const;
  static SE23 from_matrix(const Eigen::Matrix<double, 5, 5>& M);
};

SE23 operator*(const SE23& a, const SE23& b);

/// Tangent ordering is [phi, rho_v, rho_p].
SE23 se23_exp(const Vec9& xi);
Vec9 se23_log(const SE23& X);

/// Left Jacobian of SE_2(3): Exp(xi + e) ~= Exp(J_l(xi) e) * Exp(xi).
Mat9 se23_left_jacobian(const Vec9& xi);
Mat9 se23_left_jacobian_inv(const Vec9& xi);

/// Filter state on SE_2(3) x R^6.
struct State {
  SE23 X;
  Vec3 bg = Vec3::Zero();  // gyro bias, rad/s
  Vec3 ba = Vec3::Zero();  // accel bias, m/s^2

  const Rot3& R() const { return X.R; }
  const Vec3& v() const { return X.v; }
  const Vec3& p() const { return X.p; }
  bool is_finite() const;
};

/// x [+] d = (Exp(xi) * X, b + db). Left-multiplication retraction, so the
/// induced error X * Xhat^-1 is right-invariant.
State boxplus(const State& x, const Tangent15& d);

/// x [-] xhat = (Log(X * Xhat^-1), bg - bghat, ba - bahat).
Tangent15 boxminus(const State& x, const State& xhat);

/// Jacobian of ((x [+] d) [-] xhat) w.r.t. d at d = 0, where e = x [-] xhat.
/// Identity on the bias blocks.
Mat15 boxminus_jacobian(const Tangent15& e);

/// Arc angle between two directions on S^2, in radians, within [0, pi].
/// Throws InvalidInput on zero-norm input.
double s2_angle(const Vec3& g1, const Vec3& g2);

}  // namespace radlio
