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

#include "radlio/state.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "radlio/errors.hpp"

namespace radlio {

Mat12 NoiseParams::continuous_covariance() const {
  Mat12 Q = Mat12::Zero();
  Q.diagonal().segment<3>(0).setConstant(gyro * gyro);
  Q.diagonal().segment<3>(3).setConstant(accel * accel);
  Q.diagonal().segment<3>(6).setConstant(gyro_bias * gyro_bias);
  Q.diagonal().segment<3>(9).setConstant(accel_bias * accel_bias);
  return Q;
}

State propagate_state(const State& x, const ImuSample& u, const Vec3& g,
                      double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInput("propagate_state: dt must be positive and finite");
  }
  if (!x.is_finite() || !u.gyro.allFinite() || !u.accel.allFinite() ||
      !g.allFinite()) {
    throw InvalidInput("propagate_state: non-finite input");
  }
  const Vec3 acc = x.R() * (u.accel - x.ba) + g;
  State out = x;
  out.X.R = x.R() * so3_exp((u.gyro - x.bg) * dt);
  out.X.v = x.v() + acc * dt;
  out.X.p = x.p() + x.v() * dt + 0.5 * acc * dt * dt;
  return out;
}

ErrorTransition error_transition(const State& xhat, const ImuSample& u,
                                 const Vec3& g, double dt) {
  using namespace idx;
  const State next = propagate_state(xhat, u, g, dt);
  const Mat3& R = xhat.R();
  const Mat3 RJ = R * so3_left_jacobian((u.gyro - xhat.bg) * dt) * dt;
  const Mat3 G = skew(g);
  const Mat3 I = Mat3::Identity();

  ErrorTransition out;
  Mat15& F = out.Fx;
  F.setIdentity();
  F.block<3, 3>(kRot, kBg) = -RJ;
  F.block<3, 3>(kVel, kRot) = G * dt;
  F.block<3, 3>(kVel, kBg) = -skew(next.v()) * RJ;
  F.block<3, 3>(kVel, kBa) = -R * dt;
  F.block<3, 3>(kPos, kRot) = 0.5 * G * dt * dt;
  F.block<3, 3>(kPos, kVel) = I * dt;
  F.block<3, 3>(kPos, kBg) = -skew(next.p()) * RJ;
  F.block<3, 3>(kPos, kBa) = -0.5 * R * dt * dt;

  // Measurement noise enters exactly like a bias error; bias noise drives
  // the random walk.
  Mat15x12& Fn = out.Fn;
  Fn.setZero();
  Fn.block<9, 3>(0, 0) = F.block<9, 3>(0, kBg);
  Fn.block<9, 3>(0, 3) = F.block<9, 3>(0, kBa);
  Fn.block<3, 3>(kBg, 6) = I * dt;
  Fn.block<3, 3>(kBa, 9) = I * dt;
  return out;
}

Covariance15 propagate_covariance(const Covariance15& P, const Mat15& Fx,
                                  const Mat15x12& Fn, const Mat12& Qc,
                                  double dt) {
  Covariance15 out = Fx * P * Fx.transpose() + Fn * (Qc / dt) * Fn.transpose();
  return 0.5 * (out + out.transpose());
}

bool make_psd(Covariance15& P, double floor) {
  P = 0.5 * (P + P.transpose());
  Eigen::SelfAdjointEigenSolver<Mat15> es(P);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() >= floor) return false;
  const Vec15 clamped = ev.cwiseMax(floor);
  P = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  P = 0.5 * (P + P.transpose());
  return true;
}

StaticInit static_initialize(std::span<const ImuSample> buffer,
                             const StaticInitOptions& opts) {
  if (buffer.size() < 2 ||
      buffer.back().t - buffer.front().t < opts.min_duration) {
    throw InvalidInput("static_initialize: buffer shorter than minimum duration");
  }
  Vec3 acc_mean = Vec3::Zero(), gyro_mean = Vec3::Zero();
  for (const auto& s : buffer) {
    acc_mean += s.accel;
    gyro_mean += s.gyro;
  }
  const double n = static_cast<double>(buffer.size());
  acc_mean /= n;
  gyro_mean /= n;

  Vec3 acc_var = Vec3::Zero();
  for (const auto& s : buffer) {
    acc_var += (s.accel - acc_mean).cwiseAbs2();
  }
  acc_var /= n;
  if (acc_var.maxCoeff() > opts.max_accel_variance) {
    throw NotStationary("static_initialize: accelerometer variance too high");
  }
  if (!(acc_mean.norm() > 0.0)) {
    throw NotStationary("static_initialize: zero specific force");
  }

  StaticInit out;
  out.gravity = -acc_mean.normalized() * opts.gravity_norm;
  out.gyro_bias = gyro_mean;
  return out;
}

}  // namespace radlio
