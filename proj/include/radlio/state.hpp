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

#include <span>
#include <vector>

#include "radlio/manifold.hpp"

namespace radlio {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat15x12 = Eigen::Matrix<double, 15, 12>;
using Covariance15 = Mat15;

struct ImuSample {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();   // rad/s
  Vec3 accel = Vec3::Zero();  // specific force, m/s^2
};

/// Continuous-time noise densities, per axis.
struct NoiseParams {
  double gyro = 1e-3;        // rad/s/sqrt(Hz)
  double accel = 1e-2;       // m/s^2/sqrt(Hz)
  double gyro_bias = 1e-5;   // rad/s^2/sqrt(Hz)
  double accel_bias = 1e-4;  // m/s^3/sqrt(Hz)

  bool valid() const {
    return gyro > 0.0 && accel > 0.0 && gyro_bias > 0.0 && accel_bias > 0.0;
  }
  /// diag(sigma^2) ordered [n_gyro, n_accel, n_bg, n_ba].
  Mat12 continuous_covariance() const;
};

/// Zero-order-hold IMU step with n = 0:
///   R+ = R Exp((w - bg) dt), a = R (f - ba) + g,
///   v+ = v + a dt,          p+ = p + v dt + a dt^2 / 2.
/// `g` is the global gravity vector (pointing down).
State propagate_state(const State& x, const ImuSample& u, const Vec3& g,
                      double dt);

struct ErrorTransition {
  Mat15 Fx;
  Mat15x12 Fn;
};

/// Jacobians of the propagated right-invariant error w.r.t. the prior error
/// and the noise [n_gyro, n_accel, n_bg, n_ba], at zero error and zero noise.
ErrorTransition error_transition(const State& xhat, const ImuSample& u,
                                 const Vec3& g, double dt);

/// P+ = Fx P Fx^T + Fn (Qc / dt) Fn^T, re-symmetrized. Qc is the continuous
/// density matrix; Fn already carries the dt factors, so the sampled noise
/// over one step integrates to Qc * dt on the rate inputs.
Covariance15 propagate_covariance(const Covariance15& P, const Mat15& Fx,
                                  const Mat15x12& Fn, const Mat12& Qc,
                                  double dt);

/// Symmetrizes and lifts eigenvalues below `floor` to `floor`. Returns true
/// when any eigenvalue had to be clamped.
bool make_psd(Covariance15& P, double floor = 1e-12);

struct StaticInit {
  Vec3 gravity;  // global frame == initial IMU frame
  Vec3 gyro_bias;
  Rot3 R0 = Rot3::Identity();
};

struct StaticInitOptions {
  double gravity_norm = 9.81;
  double min_duration = 0.5;
  /// Per-axis accel variance above this flags the buffer as moving.
  double max_accel_variance = 0.05;
};

/// Gravity direction and gyro bias from a stationary IMU buffer.
/// Throws InvalidInput for short buffers and NotStationary for moving ones.
StaticInit static_initialize(std::span<const ImuSample> buffer,
                             const StaticInitOptions& opts = {});

}  // namespace radlio
