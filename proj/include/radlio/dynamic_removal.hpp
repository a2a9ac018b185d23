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

namespace radlio {

struct RadarNoiseModel {
  double sigma_range = 0.1;   // m
  double sigma_az = 0.01;     // rad
  double sigma_el = 0.03;     // rad
};

/// Position covariance of a radar detection: diag(sr^2, (r saz)^2, (r sel)^2)
/// in the range/azimuth/elevation basis at p, expressed in the radar frame.
Mat3 point_uncertainty(const Vec3& p, const RadarNoiseModel& noise);

/// Squared Mahalanobis distance between the xy projections of a radar point
/// and a LiDAR point (both in the radar frame), using the xy block of sigma.
double mahalanobis_2d(const Vec3& p_radar, const Vec3& p_lidar,
                      const Mat3& sigma);

struct DynamicFilterOptions {
  double threshold = 5.991;  // chi-square 2 dof, 95%
  double cell_size = 2.0;    // m, grid hash
  RadarNoiseModel noise;
};

struct DynamicFilterResult {
  std::vector<LidarPoint> kept;
  std::vector<LidarPoint> removed;
};

/// Drops every LiDAR point whose xy projection falls inside the gate of any
/// radar dynamic point. LiDAR points are in the LiDAR frame, radar points in
/// the radar frame; `radar_T_lidar` maps the former into the latter.
DynamicFilterResult filter_dynamic(std::span<const LidarPoint> lidar,
                                   std::span<const RadarPoint> dynamic_points,
                                   const Extrinsic& radar_T_lidar,
                                   const DynamicFilterOptions& opts = {});

}  // namespace radlio
