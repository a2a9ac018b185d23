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

#include "radlio/manifold.hpp"

#include <algorithm>
#include <cmath>

#include "radlio/errors.hpp"

namespace radlio {

namespace {

constexpr double kSmallAngle = 1e-5;
// The SE_2(3) coupling block loses precision faster than Rodrigues; switch to
// its series expansion much earlier.
constexpr double kSmallAngleCoupling = 5e-2;

// Coupling block of the SE(3)/SE_2(3) left Jacobian for one translational
// column rho.
Mat3 coupling_block(const Vec3& phi, const Vec3& rho) {
  const double th = phi.norm();
  const double th2 = th * th;
  double c1, c2, c3;
  if (th < kSmallAngleCoupling) {
    const double th4 = th2 * th2;
    c1 = 1.0 / 6.0 - th2 / 120.0 + th4 / 5040.0;
    c2 = 1.0 / 24.0 - th2 / 720.0 + th4 / 40320.0;
    c3 = 1.0 / 120.0 - th2 / 2520.0 + th4 / 120960.0;
  } else {
    const double s = std::sin(th), c = std::cos(th);
    c1 = (th - s) / (th2 * th);
    c2 = (th2 + 2.0 * c - 2.0) / (2.0 * th2 * th2);
    c3 = (2.0 * th - 3.0 * s + th * c) / (2.0 * th2 * th2 * th);
  }
  const Mat3 P = skew(phi);
  const Mat3 Rh = skew(rho);
  const Mat3 PR = P * Rh;
  const Mat3 RP = Rh * P;
  const Mat3 PRP = PR * P;
  return 0.5 * Rh + c1 * (PR + RP + PRP) + c2 * (P * PR + RP * P - 3.0 * PRP) +
         c3 * (PRP * P + P * PRP);
}

// (1 - cos t) / t^2, (t - sin t) / t^3 and the J_l^-1 quadratic coefficient
// 1/t^2 - (1 + cos t) / (2 t sin t), evaluated without cancellation.
double coeff_a(double th) {
  const double s = std::sin(0.5 * th);
  return th < kSmallAngle ? 0.5 - th * th / 24.0 : 2.0 * s * s / (th * th);
}

double coeff_b(double th) {
  const double th2 = th * th;
  if (th < 1e-2) return 1.0 / 6.0 - th2 / 120.0 + th2 * th2 / 5040.0;
  return (th - std::sin(th)) / (th2 * th);
}

double coeff_inv(double th) {
  const double th2 = th * th;
  if (th < 1e-2) return 1.0 / 12.0 + th2 / 720.0 + th2 * th2 / 30240.0;
  return 1.0 / th2 - (1.0 + std::cos(th)) / (2.0 * th * std::sin(th));
}

}  // namespace

bool is_rotation(const Mat3& R, double tol) {
  return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return S;
}

Rot3 so3_exp(const Vec3& phi) {
  const double th = phi.norm();
  const Mat3 K = skew(phi);
  if (th < kSmallAngle) {
    return Mat3::Identity() + K + 0.5 * K * K;
  }
  return Mat3::Identity() + (std::sin(th) / th) * K + coeff_a(th) * K * K;
}

So3Log so3_log_checked(const Rot3& R) {
  const Vec3 w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double s = 0.5 * w.norm();
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double th = std::atan2(s, c);

  So3Log out;
  if (th < kSmallAngle) {
    out.phi = 0.5 * (1.0 + th * th / 6.0) * w;
    return out;
  }
  if (c > -0.99) {
    out.phi = (th / (2.0 * s)) * w;
    return out;
  }
  // Near pi: R + R^T = 2c I + 2(1 - c) a a^T.
  const Mat3 aat = (0.5 * (R + R.transpose()) - c * Mat3::Identity()) / (1.0 - c);
  int k = 0;
  aat.diagonal().maxCoeff(&k);
  Vec3 axis = aat.col(k) / std::sqrt(std::max(aat(k, k), 1e-300));
  axis.normalize();
  if (axis.dot(w) < 0.0) axis = -axis;
  out.phi = th * axis;
  out.reduced_precision = std::abs(th - M_PI) < 1e-6;
  return out;
}

Vec3 so3_log(const Rot3& R) { return so3_log_checked(R).phi; }

Mat3 so3_left_jacobian(const Vec3& phi) {
  const double th = phi.norm();
  const Mat3 K = skew(phi);
  return Mat3::Identity() + coeff_a(th) * K + coeff_b(th) * K * K;
}

Mat3 so3_left_jacobian_inv(const Vec3& phi) {
  const double th = phi.norm();
  const Mat3 K = skew(phi);
  return Mat3::Identity() - 0.5 * K + coeff_inv(th) * K * K;
}

Mat3 so3_right_jacobian(const Vec3& phi) { return so3_left_jacobian(-phi); }

SE23 SE23::inverse() const {
  SE23 out;
  out.R = R.transpose();
  out.v = -out.R * v;
  out.p = -out.R * p;
  return out;
}

Eigen::Matrix<double, 5, 5> SE23::matrix() const {
  Eigen::Matrix<double, 5, 5> M = Eigen::Matrix<double, 5, 5>::Identity();
  M.block<3, 3>(0, 0) = R;
  M.block<3, 1>(0, 3) = v;
  M.block<3, 1>(0, 4) = p;
  return M;
}

SE23 SE23::from_matrix(const Eigen::Matrix<double, 5, 5>& M) {
  SE23 out;
  out.R = M.block<3, 3>(0, 0);
  out.v = M.block<3, 1>(0, 3);
  out.p = M.block<3, 1>(0, 4);
  return out;
}

SE23 operator*(const SE23& a, const SE23& b) {
  SE23 out;
  out.R = a.R * b.R;
  out.v = a.R * b.v + a.v;
  out.p = a.R * b.p + a.p;
  return out;
}

SE23 se23_exp(const Vec9& xi) {
  const Vec3 phi = xi.segment<3>(0);
  const Mat3 J = so3_left_jacobian(phi);
  SE23 out;
  out.R = so3_exp(phi);
  out.v = J * xi.segment<3>(3);
  out.p = J * xi.segment<3>(6);
  return out;
}

Vec9 se23_log(const SE23& X) {
  const Vec3 phi = so3_log(X.R);
  const Mat3 Jinv = so3_left_jacobian_inv(phi);
  Vec9 xi;
  xi << phi, Jinv * X.v, Jinv * X.p;
  return xi;
}

Mat9 se23_left_jacobian(const Vec9& xi) {
  const Vec3 phi = xi.segment<3>(0);
  const Mat3 J = so3_left_jacobian(phi);
  Mat9 out = Mat9::Zero();
  out.block<3, 3>(0, 0) = J;
  out.block<3, 3>(3, 3) = J;
  out.block<3, 3>(6, 6) = J;
  out.block<3, 3>(3, 0) = coupling_block(phi, xi.segment<3>(3));
  out.block<3, 3>(6, 0) = coupling_block(phi, xi.segment<3>(6));
  return out;
}

Mat9 se23_left_jacobian_inv(const Vec9& xi) {
  const Vec3 phi = xi.segment<3>(0);
  const Mat3 Ji = so3_left_jacobian_inv(phi);
  Mat9 out = Mat9::Zero();
  out.block<3, 3>(0, 0) = Ji;
  out.block<3, 3>(3, 3) = Ji;
  out.block<3, 3>(6, 6) = Ji;
  out.block<3, 3>(3, 0) = -Ji * coupling_block(phi, xi.segment<3>(3)) * Ji;
  out.block<3, 3>(6, 0) = -Ji * coupling_block(phi, xi.segment<3>(6)) * Ji;
  return out;
}

bool State::is_finite() const {
  return X.R.allFinite() && X.v.allFinite() && X.p.allFinite() &&
         bg.allFinite() && ba.allFinite();
}

State boxplus(const State& x, const Tangent15& d) {
  State out;
  out.X = se23_exp(d.head<9>()) * x.X;
  out.bg = x.bg + d.segment<3>(idx::kBg);
  out.ba = x.ba + d.segment<3>(idx::kBa);
  return out;
}

Tangent15 boxminus(const State& x, const State& xhat) {
  Tangent15 out;
  out.head<9>() = se23_log(x.X * xhat.X.inverse());
  out.segment<3>(idx::kBg) = x.bg - xhat.bg;
  out.segment<3>(idx::kBa) = x.ba - xhat.ba;
  return out;
}

Mat15 boxminus_jacobian(const Tangent15& e) {
  Mat15 J = Mat15::Identity();
  J.topLeftCorner<9, 9>() = se23_left_jacobian_inv(e.head<9>());
  return J;
}

double s2_angle(const Vec3& g1, const Vec3& g2) {
  const double n1 = g1.norm(), n2 = g2.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) {
    throw InvalidInput("s2_angle: zero-norm direction");
  }
  const Vec3 a = g1 / n1, b = g2 / n2;
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace radlio
