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
#include <string>
#include <vector>

#include "radlio/dataset.hpp"
#include "radlio/dynamic_removal.hpp"
#include "radlio/gravity.hpp"
#include "radlio/keyvalue.hpp"
#include "radlio/radar.hpp"
#include "radlio/state.hpp"
#include "radlio/update.hpp"

namespace radlio {

struct RunConfig {
  NoiseParams imu_noise;
  double init_duration = 1.0;  // s of stationary IMU at the start
  double init_max_accel_variance = 0.05;
  /// Prior standard deviations at initialization.
  double init_std_rot = 0.01;   // rad
  double init_std_vel = 0.01;   // m/s
  double init_std_pos = 1e-4;   // m
  double init_std_bg = 1e-3;    // rad/s
  double init_std_ba = 0.05;    // m/s^2

  double lidar_variance = 0.05 * 0.05;    // R_L
  double doppler_variance = 0.05 * 0.05;  // R_v
  double doppler_alpha = 0.05 * 0.05;     // inflation per unit |z-score|
  double gravity_variance = 1e-4;         // R_g
  double ransac_threshold = 0.15;         // tau_r, also the segmentation gate
  int ransac_iterations = 34;
  double removal_threshold = 5.991;       // epsilon, chi-square 2 dof
  RadarNoiseModel radar_noise;
  /// Radar field of view used to report removal statistics for the region
  /// the radar can observe.
  double radar_hfov_deg = 120.0;
  double radar_max_range = 80.0;

  double map_voxel_leaf = 0.5;
  double scan_voxel_leaf = 0.5;
  int max_lidar_points = 2000;
  /// Farther returns are not used: they are sparse, so their plane fits are
  /// poor and their map positions amplify attitude error.
  double lidar_max_range = 30.0;  // m
  int knn = 5;
  double plane_max_point_distance = 0.1;
  double plane_max_neighbor_distance = 2.0;
  /// LiDAR residuals beyond this many standard deviations of the predicted
  /// innovation are dropped.
  double plane_gate = 3.0;

  int max_iterations = 5;
  double tolerance = 1e-4;
  int gravity_max_iterations = 5;

  bool gravity_residual = true;
  bool velocity_residual = true;
  bool dynamic_removal = true;
  /// Evaluates the MAP cost before and after every first-stage update.
  bool check_cost = false;
  std::uint64_t seed = 0;
};

/// Throws ConfigError on unknown keys or out-of-range values.
RunConfig read_run_config(const KeyValueFile& kv);
KeyValueFile write_run_config(const RunConfig& cfg);
void validate(const RunConfig& cfg);

/// Removal counts over fresh (non-filled) LiDAR points with a simulator label.
struct DynamicStats {
  std::uint64_t removed_dynamic = 0;
  std::uint64_t removed_static = 0;
  std::uint64_t kept_dynamic = 0;
  std::uint64_t kept_static = 0;

  double precision() const;       // of the removed set; 1 if nothing removed
  double recall() const;          // of the dynamic set; 1 if none present
  double false_removal() const;   // fraction of static points removed
};

/// Adds the labeled, non-filled points of one removal pass to `stats`.
void accumulate(DynamicStats& stats, const DynamicFilterResult& result);

struct SweepRecord {
  double t = 0.0;
  /// Residual counts from the last model evaluation of the first stage.
  int lidar_residuals = 0;
  int radar_residuals = 0;
  int filled_bins = 0;
  int iterations = 0;
  bool radar_degenerate = false;
  double cost_prior = 0.0;      // only with check_cost
  double cost_posterior = 0.0;  // only with check_cost
};

struct RunResult {
  TrajectoryEstimate trajectory;
  Vec3 g_init = Vec3::Zero();
  std::vector<GravityLogRow> gravity_aware;
  std::vector<GravityLogRow> gravity_ignorant;
  DynamicStats dynamic;
  DynamicStats dynamic_in_view;  // points inside the radar field of view
  std::vector<SweepRecord> sweeps;
  int degenerate_radar_sweeps = 0;
  int covariance_repairs = 0;  // posteriors that were not symmetric PSD
  int cost_increases = 0;      // only with check_cost
};

/// Static initialization, then per radar interval: sweep reconstruction,
/// IMU prediction, motion compensation, radar ego velocity and segmentation,
/// dynamic removal, first-stage update, gravity second stage, map insertion.
/// Deterministic given config and data. Throws DataError for missing or
/// too-short streams.
RunResult run_pipeline(const RunConfig& cfg, Dataset& data);
RunResult run_pipeline(const RunConfig& cfg, const std::string& dataset_dir);

}  // namespace radlio
