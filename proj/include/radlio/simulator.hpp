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
#include <optional>
#include <string>
#include <vector>

#include "radlio/keyvalue.hpp"
#include "radlio/manifold.hpp"
#include "radlio/sensor_types.hpp"
#include "radlio/state.hpp"

namespace radlio {

inline const Vec3 kWorldGravity(0.0, 0.0, -9.81);

enum class TrajectoryFamily { kFigureEight, kLoopWithHill, kStraightDescent };

std::string to_string(TrajectoryFamily f);
TrajectoryFamily parse_family(const std::string& s);  // throws ConfigError

/// Closed-form path p = f(u) traversed with a phase u(t) that is constant for
/// `stationary` seconds, then ramps (C2) to a constant rate over `ramp`
/// seconds. The body x axis follows the path tangent, no roll.
struct TrajectorySpec {
  TrajectoryFamily family = TrajectoryFamily::kFigureEight;
  double duration = 60.0;   // s
  double speed = 3.0;       // m/s, mean cruise speed
  double size = 20.0;       // m, lobe / loop radius
  double elevation = 0.0;   // m, hill height or total descent
  double stationary = 1.5;  // s
  double ramp = 3.0;        // s
};

struct TruthSample {
  double t = 0.0;
  Mat3 R = Mat3::Identity();  // body to world
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();      // world acceleration
  Vec3 omega = Vec3::Zero();  // body angular rate
};

class Trajectory {
 public:
  explicit Trajectory(const TrajectorySpec& spec);
  TruthSample at(double t) const;
  const TrajectorySpec& spec() const { return spec_; }

 private:
  struct PathPoint {
    Vec3 f, df, ddf;
  };
  PathPoint path(double u) const;
  void phase(double t, double& u, double& du, double& ddu) const;

  TrajectorySpec spec_;
  double rate_ = 0.0;  // du/dt at cruise
};

/// Samples at `rate` Hz over [0, duration].
std::vector<TruthSample> gen_truth(const TrajectorySpec& spec, double rate);

/// Axis-aligned rectangle: normal is a coordinate axis, half_extent gives the
/// half sizes along the other two axes (the component along the normal is
/// ignored).
struct ScenePlane {
  Vec3 center = Vec3::Zero();
  int normal_axis = 2;
  Vec3 half_extent = Vec3::Ones();
};

/// Axis-aligned box whose center oscillates along `direction`:
/// c(t) = center + direction * amplitude * sin(omega t + phase).
struct SceneBox {
  Vec3 center = Vec3::Zero();
  Vec3 half_size = Vec3::Ones();
  Vec3 direction = Vec3::UnitX();
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;

  Vec3 center_at(double t) const;
  Vec3 velocity_at(double t) const;
  bool moving() const { return amplitude > 0.0 && omega != 0.0; }
};

struct Scene {
  std::vector<ScenePlane> planes;
  std::vector<SceneBox> boxes;   // static structure
  std::vector<SceneBox> movers;  // labeled dynamic
};

struct RayHit {
  double range = 0.0;
  bool dynamic = false;
  int mover = -1;
};

/// Nearest hit along origin + s * dir (dir unit), s in (min_range, max_range).
std::optional<RayHit> cast_ray(const Scene& scene, const Vec3& origin,
                               const Vec3& dir, double t, double min_range,
                               double max_range);

struct SceneSpec {
  bool ground = true;
  double ground_height = -1.2;  // relative to the start position
  bool buildings = true;
  double building_spacing = 14.0;  // m
  double clearance = 4.0;          // m from the trajectory
  int movers = 3;
};

Scene make_scene(const Trajectory& traj, const SceneSpec& spec, std::uint64_t seed);

struct SensorRig {
  SensorExtrinsics extrinsics;
  double imu_rate = 400.0;
  double lidar_rate = 10.0;
  double radar_rate = 15.0;

  // IMU, per-sample white noise std and bias random walk std per sqrt(s).
  double gyro_noise = 0.0;
  double accel_noise = 0.0;
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 accel_bias = Vec3::Zero();
  double gyro_bias_walk = 0.0;
  double accel_bias_walk = 0.0;

  // LiDAR: rings spread over [-fov/2, fov/2] elevation.
  int lidar_rings = 16;
  double lidar_vfov_deg = 30.0;
  int lidar_azimuth_steps = 1800;
  double lidar_range_noise = 0.0;
  double lidar_min_range = 0.5;
  double lidar_max_range = 100.0;

  // Radar, forward facing in its own frame.
  double radar_hfov_deg = 120.0;
  double radar_vfov_deg = 30.0;
  double radar_grid_deg = 2.0;
  int radar_max_points = 200;
  double radar_range_noise = 0.0;
  double radar_azimuth_noise = 0.0;    // rad
  double radar_elevation_noise = 0.0;  // rad
  double radar_doppler_noise = 0.0;    // m/s
  double radar_clutter_rate = 0.0;     // clutter points per scan (mean)
  double radar_min_range = 0.5;
  double radar_max_range = 80.0;

  static SensorRig default_rig();  // default mounting, zero noise
  static SensorRig noisy_rig();    // default mounting, nominal noise
};

std::vector<ImuSample> synth_imu(const Trajectory& traj, const SensorRig& rig,
                                 std::uint64_t seed);

/// Returns of every LiDAR firing with stamp in [t0, t1), in the LiDAR frame,
/// labeled static or dynamic. Firings are indexed globally by time, so any
/// split into windows yields the same points.
std::vector<LidarPoint> synth_lidar(const Trajectory& traj, const Scene& scene,
                                    const SensorRig& rig, std::uint64_t seed,
                                    double t0, double t1);

/// One radar scan per radar period over (0, duration].
std::vector<RadarScan> synth_radar(const Trajectory& traj, const Scene& scene,
                                   const SensorRig& rig, std::uint64_t seed);

RadarScan synth_radar_scan(const Trajectory& traj, const Scene& scene,
                           const SensorRig& rig, std::uint64_t seed, double t);

/// Everything needed to regenerate a synthetic dataset.
struct SimulationSpec {
  TrajectorySpec trajectory;
  SceneSpec scene;
  SensorRig rig = SensorRig::noisy_rig();
};

SimulationSpec read_simulation_spec(const KeyValueFile& kv);
KeyValueFile write_simulation_spec(const SimulationSpec& spec);

/// Sub-seeds for independent streams derived from one run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace radlio
