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
#include <memory>
#include <string>
#include <vector>

#include "radlio/manifold.hpp"
#include "radlio/sensor_types.hpp"
#include "radlio/simulator.hpp"
#include "radlio/state.hpp"

namespace radlio {

struct TumPose {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
};

using TrajectoryEstimate = std::vector<TumPose>;

/// `t x y z qx qy qz qw` per line. Throws DataError on malformed lines or
/// non-increasing stamps.
TrajectoryEstimate read_tum(const std::string& path);
void write_tum(const std::string& path, const TrajectoryEstimate& traj);

/// LiDAR returns by firing time, so sources can generate or load lazily.
class LidarSource {
 public:
  virtual ~LidarSource() = default;
  /// All points with stamp in [t0, t1), ordered by stamp.
  virtual std::vector<LidarPoint> points(double t0, double t1) = 0;
};

struct Dataset {
  std::vector<ImuSample> imu;
  std::vector<RadarScan> radar;
  std::unique_ptr<LidarSource> lidar;
  SensorExtrinsics extrinsics;
  TrajectoryEstimate gt;  // may be empty
};

/// Reads the directory layout:
///   imu.csv          t,wx,wy,wz,ax,ay,az
///   lidar/<t0>.csv   t,x,y,z[,label]   one file per revolution starting at t0
///   radar/<t>.csv    x,y,z,doppler[,label]   one scan stamped t
///   calib.cfg        imu_R_lidar, imu_t_lidar, imu_R_radar, imu_t_radar
///   gt.tum           optional
/// Labels are 0 unknown, 1 static, 2 dynamic. Throws DataError.
Dataset read_dataset(const std::string& dir);

/// Generated in memory; LiDAR is ray cast on demand.
Dataset simulated_dataset(const SimulationSpec& spec, std::uint64_t seed);

/// Writes a simulated dataset in the directory layout above.
void write_simulated_dataset(const std::string& dir, const SimulationSpec& spec,
                             std::uint64_t seed);

/// Ground truth of a simulated run at every radar stamp (including t = 0),
/// which are the stamps the pipeline reports poses at.
TrajectoryEstimate simulated_ground_truth(const SimulationSpec& spec);

}  // namespace radlio
