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

#include <cstdint>
#include <vector>

#include "radlio/manifold.hpp"

namespace radlio {

/// Ground-truth provenance carried by simulated points. Real data is
/// kUnknown; the filter never reads it.
enum class PointLabel : std::uint8_t { kUnknown = 0, kStatic = 1, kDynamic = 2 };

struct LidarPoint {
  double t = 0.0;          // per-point stamp, s
  Vec3 p = Vec3::Zero();   // LiDAR frame, m
  PointLabel label = PointLabel::kUnknown;
  /// Set when sweep reconstruction borrowed the point from the previous sweep.
  bool filled = false;
};

struct RadarPoint {
  Vec3 p = Vec3::Zero();  // radar frame, m
  double doppler = 0.0;   // m/s, positive when closing on the point
  PointLabel label = PointLabel::kUnknown;
};

struct RadarScan {
  double t = 0.0;
  std::vector<RadarPoint> points;
};

/// Rigid transform a_T_b: maps b-frame coordinates into frame a.
struct Extrinsic {
  Rot3 R = Rot3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return R * x + t; }
  Extrinsic inverse() const { return {R.transpose(), -R.transpose() * t}; }
  Extrinsic operator*(const Extrinsic& o) const { return {R * o.R, R * o.t + t}; }
};

/// IMU-frame poses of the two exteroceptive sensors.
struct SensorExtrinsics {
  Extrinsic imu_T_lidar;
  Extrinsic imu_T_radar;

  Extrinsic radar_T_lidar() const { return imu_T_radar.inverse() * imu_T_lidar; }
};

}  // namespace radlio
