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

#include <functional>
#include <optional>
#include <vector>

#include "radlio/manifold.hpp"
#include "radlio/map_index.hpp"
#include "radlio/sensor_types.hpp"
#include "radlio/state.hpp"

namespace radlio {

enum class BlockTag { kLidar, kRadar, kGravity };

using Jacobian15 = Eigen::Matrix<double, Eigen::Dynamic, 15>;

/// Linearized measurement: r(x ⊞ d) ≈ r + H d, noise covariance R.
struct ResidualBlock {
  Eigen::VectorXd r;
  Jacobian15 H;
  Eigen::MatrixXd R;
  BlockTag tag = BlockTag::kLidar;

  int rows() const { return static_cast<int>(r.size()); }
  static ResidualBlock scalar(double r, const Eigen::Matrix<double, 1, 15>& H,
                              double R, BlockTag tag);
};

/// Point-to-plane distance of a LiDAR point mapped into the world frame.
/// Returns nullopt for an invalid plane.
std::optional<ResidualBlock> lidar_residual(const State& x, const Vec3& p_lidar,
                                            const PlaneFit& plane,
                                            const Extrinsic& imu_T_lidar,
                                            double variance);

/// Predicted minus measured Doppler of a static radar point. `gyro` is the
/// raw angular rate; the state's gyro bias is removed inside.
ResidualBlock radar_residual(const State& x, const RadarPoint& pt,
                             const Vec3& gyro, const Extrinsic& imu_T_radar,
                             double variance);

/// Rebuilds residual blocks at a linearization point. Called once per
/// iteration so data association can follow the state.
using ResidualModel = std::function<std::vector<ResidualBlock>(const State&)>;

struct UpdateOptions {
  int max_iterations = 5;
  double tolerance = 1e-4;  // on the step norm
  int max_halvings = 4;     // step halvings when the objective rises
};

struct UpdateResult {
  State x;
  Covariance15 P;
  int iterations = 0;
  bool converged = false;
  bool clamped = false;  // covariance needed PSD repair
};

/// Iterated error-state Kalman update on the manifold. Each iteration
/// linearizes at the current iterate with the prior re-expressed there,
/// P = J^-1 P_hat J^-T, J = d(x ⊟ x_hat)/dd. Uses the information form when
/// the measurement dimension exceeds the state dimension, the gain form
/// K = P H^T (H P H^T + R)^-1 otherwise. A step that raises the objective
/// is halved up to `max_halvings` times, then abandoned.
UpdateResult iterated_update(const State& xhat, const Covariance15& Phat,
                             const ResidualModel& model,
                             const UpdateOptions& opts = {});

/// Objective minimized by the update: prior Mahalanobis term plus weighted
/// squared residuals.
double map_cost(const State& x, const State& xhat, const Covariance15& Phat,
                const std::vector<ResidualBlock>& blocks);

}  // namespace radlio
