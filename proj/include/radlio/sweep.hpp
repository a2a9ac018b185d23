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
#include "radlio/sensor_types.hpp"
#include "radlio/state.hpp"

namespace radlio {

inline constexpr int kAzimuthBins = 36;

/// Everything observed in [t0, t1), with t1 the radar scan stamp.
struct Sweep {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<LidarPoint> lidar;
  /// Sorted; boundary samples at exactly t0 and t1 are interpolated from the
  /// stream when it brackets them.
  std::vector<ImuSample> imu;
  RadarScan radar;
  int filled_bins = 0;
  /// Motion-compensated points in the LiDAR frame at t1. Set by the caller
  /// after compensation; used to fill the next sweep's empty sectors.
  std::vector<LidarPoint> compensated;
};

/// Azimuth bin of a LiDAR-frame point, [0, kAzimuthBins).
int azimuth_bin(const Vec3& p);

/// Interpolated IMU reading at t; the stream must bracket t.
ImuSample interpolate_imu(std::span<const ImuSample> imu, double t);

/// Bundles the streams over [t0, radar.t). Azimuth bins with no current
/// points are filled with `prev->compensated` points of that bin, restamped
/// to t0 and marked `filled`.
Sweep reconstruct_sweep(std::span<const LidarPoint> lidar_stream,
                        std::span<const ImuSample> imu_stream,
                        const RadarScan& radar, double t0,
                        const Sweep* prev = nullptr);

struct CompensationResult {
  std::vector<LidarPoint> points;  // LiDAR frame at sweep.t1
  int dropped = 0;                 // stamps outside the interval
};

/// Body poses at each IMU stamp of the sweep, propagated from x0 (the state at
/// sweep.t0) with the average of consecutive readings over each step.
std::vector<State> imu_poses(const Sweep& sweep, const State& x0, const Vec3& g);

/// Pose at time t by linear/spherical interpolation between IMU poses.
SE23 interpolate_pose(const Sweep& sweep, const std::vector<State>& poses,
                      double t);

/// Moves every LiDAR point of the sweep into the LiDAR frame at sweep.t1.
CompensationResult motion_compensate(const Sweep& sweep, const State& x0,
                                     const Vec3& g,
                                     const Extrinsic& imu_T_lidar);

}  // namespace radlio
