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


#include "radlio/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "radlio/errors.hpp"

namespace radlio {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

Mat3 rot_z(double a) {
  Mat3 R;
  R << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return R;
}

Mat3 rot_y(double a) {
  Mat3 R;
  R << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return R;
}

// Quintic smoothstep and its integral: zero rate, acceleration and jerk
// continuity at both ends of the ramp.
double ramp_rate(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double ramp_rate_dot(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }
double ramp_integral(double s) { return s * s * s * s * (2.5 + s * (-3.0 + s)); }

Vec3 spherical(double range, double az, double el) {
  return range * Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                      std::sin(el));
}

// Distance in xy from a point to an axis-aligned rectangle.
double xy_distance_to_box(const Vec3& p, const Vec3& c, const Vec3& half) {
  const double dx = std::max(0.0, std::abs(p.x() - c.x()) - half.x());
  const double dy = std::max(0.0, std::abs(p.y() - c.y()) - half.y());
  return std::hypot(dx, dy);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string to_string(TrajectoryFamily f) {
  switch (f) {
    case TrajectoryFamily::kFigureEight: return "figure-eight";
    case TrajectoryFamily::kLoopWithHill: return "loop-with-hill";
    case TrajectoryFamily::kStraightDescent: return "straight-descent";
  }
  return "unknown";
}

TrajectoryFamily parse_family(const std::string& s) {
  if (s == "figure-eight") return TrajectoryFamily::kFigureEight;
  if (s == "loop-with-hill") return TrajectoryFamily::kLoopWithHill;
  if (s == "straight-descent") return TrajectoryFamily::kStraightDescent;
  throw ConfigError("unknown trajectory family: " + s);
}

Trajectory::Trajectory(const TrajectorySpec& spec) : spec_(spec) {
  if (!(spec.duration > 0.0) || !(spec.speed >= 0.0) || !(spec.size > 0.0) ||
      !(spec.ramp > 0.0) || !(spec.stationary >= 0.0)) {
    throw ConfigError("invalid trajectory spec");
  }
  // Rate giving the requested mean speed over one period of the path.
  double mean_norm = 0.0;
  constexpr int kN = 2000;
  for (int i = 0; i < kN; ++i) mean_norm += path(2.0 * kPi * i / kN).df.norm();
  mean_norm /= kN;
  rate_ = spec.speed / mean_norm;
}

Trajectory::PathPoint Trajectory::path(double u) const {
  const double A = spec_.size, E = spec_.elevation;
  PathPoint pp;
  switch (spec_.family) {
    case TrajectoryFamily::kFigureEight:
      pp.f = Vec3(A * std::sin(u), 0.5 * A * std::sin(2 * u), E * std::sin(u));
      pp.df = Vec3(A * std::cos(u), A * std::cos(2 * u), E * std::cos(u));
      pp.ddf = Vec3(-A * std::sin(u), -2 * A * std::sin(2 * u), -E * std::sin(u));
      break;
    case TrajectoryFamily::kLoopWithHill:
      pp.f = Vec3(A * std::sin(u), A * (1 - std::cos(u)), 0.5 * E * (1 - std::cos(u)));
      pp.df = Vec3(A * std::cos(u), A * std::sin(u), 0.5 * E * std::sin(u));
      pp.ddf = Vec3(-A * std::sin(u), A * std::cos(u), 0.5 * E * std::cos(u));
      break;
    case TrajectoryFamily::kStraightDescent: {
      // u is distance along x; the grade spreads `elevation` over the run.
      const double cruise = std::max(
          1.0, spec_.speed * (spec_.duration - spec_.stationary - 0.5 * spec_.ramp));
      const double slope = E / cruise;
      pp.f = Vec3(u, 0, -slope * u);
      pp.df = Vec3(1, 0, -slope);
      pp.ddf = Vec3::Zero();
      break;
    }
  }
  return pp;
}

void Trajectory::phase(double t, double& u, double& du, double& ddu) const {
  const double ts = spec_.stationary, tr = spec_.ramp, c = rate_;
  if (t <= ts) {
    u = du = ddu = 0.0;
  } else if (t < ts + tr) {
    const double s = (t - ts) / tr;
    u = c * tr * ramp_integral(s);
    du = c * ramp_rate(s);
    ddu = c * ramp_rate_dot(s) / tr;
  } else {
    u = c * tr * 0.5 + c * (t - ts - tr);
    du = c;
    ddu = 0.0;
  }
}

TruthSample Trajectory::at(double t) const {
  double u, du, ddu;
  phase(t, u, du, ddu);
  const PathPoint pp = path(u);
  TruthSample s;
  s.t = t;
  s.p = pp.f;
  s.v = pp.df * du;
  s.a = pp.ddf * du * du + pp.df * ddu;

  const Vec3& d = pp.df;
  const Vec3& dd = pp.ddf;
  const double h2 = d.x() * d.x() + d.y() * d.y();
  const double h = std::sqrt(h2);
  const double yaw = std::atan2(d.y(), d.x());
  const double pitch = -std::atan2(d.z(), h);
  const double yaw_rate = du * (d.x() * dd.y() - d.y() * dd.x()) / h2;
  const double h_dot = (d.x() * dd.x() + d.y() * dd.y()) / h;
  const double pitch_rate = -du * (h * dd.z() - d.z() * h_dot) / (h2 + d.z() * d.z());
  const Mat3 Ry = rot_y(pitch);
  s.R = rot_z(yaw) * Ry;
  s.omega = Ry.transpose() * Vec3(0, 0, yaw_rate) + Vec3(0, pitch_rate, 0);
  return s;
}

std::vector<TruthSample> gen_truth(const TrajectorySpec& spec, double rate) {
  const Trajectory traj(spec);
  std::vector<TruthSample> out;
  const long n = std::lround(std::floor(spec.duration * rate + 1e-9));
  out.reserve(n + 1);
  for (long i = 0; i <= n; ++i) out.push_back(traj.at(i / rate));
  return out;
}

Vec3 SceneBox::center_at(double t) const {
  return center + direction * (amplitude * std::sin(omega * t + phase));
}

Vec3 SceneBox::velocity_at(double t) const {
  return direction * (amplitude * omega * std::cos(omega * t + phase));
}

namespace {

// Slab test; entry distance if the ray enters the box in (lo, hi).
std::optional<double> ray_box(const Vec3& o, const Vec3& d, const Vec3& c,
                              const Vec3& half, double lo, double hi) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double mn = c[k] - half[k], mx = c[k] + half[k];
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] < mn || o[k] > mx) return std::nullopt;
      continue;
    }
    double a = (mn - o[k]) / d[k], b = (mx - o[k]) / d[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 > lo && t0 < hi) return t0;
  return std::nullopt;
}

}  // namespace

std::optional<RayHit> cast_ray(const Scene& scene, const Vec3& o, const Vec3& d,
                               double t, double min_range, double max_range) {
  std::optional<RayHit> best;
  double hi = max_range;
  for (const ScenePlane& pl : scene.planes) {
    const int k = pl.normal_axis;
    if (std::abs(d[k]) < 1e-12) continue;
    const double s = (pl.center[k] - o[k]) / d[k];
    if (s <= min_range || s >= hi) continue;
    const Vec3 hit = o + s * d;
    bool inside = true;
    for (int j = 0; j < 3; ++j) {
      if (j != k && std::abs(hit[j] - pl.center[j]) > pl.half_extent[j]) inside = false;
    }
    if (!inside) continue;
    hi = s;
    best = RayHit{s, false, -1};
  }
  for (const SceneBox& b : scene.boxes) {
    if (auto s = ray_box(o, d, b.center, b.half_size, min_range, hi)) {
      hi = *s;
      best = RayHit{*s, false, -1};
    }
  }
  for (std::size_t i = 0; i < scene.movers.size(); ++i) {
    const SceneBox& b = scene.movers[i];
    if (auto s = ray_box(o, d, b.center_at(t), b.half_size, min_range, hi)) {
      hi = *s;
      best = RayHit{*s, true, static_cast<int>(i)};
    }
  }
  return best;
}

Scene make_scene(const Trajectory& traj, const SceneSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 101));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const TrajectorySpec& ts = traj.spec();

  std::vector<Vec3> path;
  for (double t = 0.0; t <= ts.duration; t += 0.25) path.push_back(traj.at(t).p);
  Vec3 lo = path.front(), hi = path.front();
  for (const Vec3& p : path) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double ground_z = path.front().z() + spec.ground_height;
  auto clear_of_path = [&](const Vec3& c, const Vec3& half, double margin) {
    for (const Vec3& p : path) {
      if (xy_distance_to_box(p, c, half) < margin) return false;
    }
    return true;
  };

  Scene scene;
  if (spec.ground) {
    ScenePlane g;
    g.center = Vec3(0.5 * (lo.x() + hi.x()), 0.5 * (lo.y() + hi.y()), ground_z);
    g.normal_axis = 2;
    g.half_extent = Vec3(0.5 * (hi.x() - lo.x()) + 150.0, 0.5 * (hi.y() - lo.y()) + 150.0, 0);
    scene.planes.push_back(g);
  }

  // Movers first so buildings can keep out of their swept volume.
  std::vector<std::pair<Vec3, Vec3>> keep_out;  // center, half size
  const double t_cruise = ts.stationary + ts.ramp;
  for (int m = 0, tries = 0; m < spec.movers && tries < 500; ++tries) {
    const double t = t_cruise + (ts.duration - t_cruise) * (m + u01(rng)) / spec.movers;
    const TruthSample s = traj.at(std::min(t, ts.duration));
    Vec3 fwd(s.R(0, 0), s.R(1, 0), 0);
    if (fwd.norm() < 1e-6) continue;
    fwd.normalize();
    const Vec3 left(-fwd.y(), fwd.x(), 0);
    SceneBox b;
    const bool car = u01(rng) < 0.4;
    b.half_size = car ? Vec3(2.0, 0.9, 0.75) : Vec3(0.3, 0.3, 0.9);
    const double side = u01(rng) < 0.5 ? -1.0 : 1.0;
    b.center = s.p + fwd * (8.0 + 6.0 * u01(rng)) +
               left * side * (spec.clearance + 1.5 + 3.0 * u01(rng));
    b.center.z() = ground_z + b.half_size.z();
    b.direction = fwd;
    b.amplitude = 2.0 + 2.0 * u01(rng);
    b.omega = (car ? 2.5 : 1.2) / b.amplitude;
    b.phase = 2.0 * kPi * u01(rng);
    // Swept footprint: oscillation along fwd, so inflate the box along it.
    const Vec3 swept_half = b.half_size + b.amplitude * fwd.cwiseAbs();
    if (!clear_of_path(b.center, swept_half, 1.5)) continue;
    scene.movers.push_back(b);
    keep_out.emplace_back(b.center, swept_half);
    ++m;
  }

  if (spec.buildings) {
    const double sp = spec.building_spacing;
    for (double x = lo.x() - 40.0; x <= hi.x() + 40.0; x += sp) {
      for (double y = lo.y() - 40.0; y <= hi.y() + 40.0; y += sp) {
        SceneBox b;
        b.half_size = Vec3(2.0 + 2.0 * u01(rng), 2.0 + 2.0 * u01(rng), 3.0 + 5.0 * u01(rng));
        b.center = Vec3(x + (u01(rng) - 0.5) * 0.3 * sp, y + (u01(rng) - 0.5) * 0.3 * sp,
                        ground_z + b.half_size.z());
        if (!clear_of_path(b.center, b.half_size, spec.clearance)) continue;
        bool overlaps = false;
        for (const auto& [c, h] : keep_out) {
          if (std::abs(c.x() - b.center.x()) < h.x() + b.half_size.x() + 1.0 &&
              std::abs(c.y() - b.center.y()) < h.y() + b.half_size.y() + 1.0) {
            overlaps = true;
          }
        }
        if (!overlaps) scene.boxes.push_back(b);
      }
    }
  }
  return scene;
}

SensorRig SensorRig::default_rig() {
  SensorRig rig;
  rig.extrinsics.imu_T_lidar = {so3_exp(Vec3(0.0, 0.0, 0.02)), Vec3(0.0, 0.0, 0.25)};
  rig.extrinsics.imu_T_radar = {so3_exp(Vec3(0.0, -0.03, 0.01)), Vec3(0.6, 0.05, -0.1)};
  return rig;
}

SensorRig SensorRig::noisy_rig() {
  SensorRig rig = default_rig();
  rig.gyro_noise = 0.002;
  rig.accel_noise = 0.02;
  rig.gyro_bias = Vec3(0.002, -0.001, 0.0015);
  rig.accel_bias = Vec3(0.03, -0.02, 0.04);
  rig.gyro_bias_walk = 1e-5;
  rig.accel_bias_walk = 1e-4;
  rig.lidar_range_noise = 0.02;
  rig.radar_range_noise = 0.1;
  rig.radar_azimuth_noise = 0.01;
  rig.radar_elevation_noise = 0.03;
  rig.radar_doppler_noise = 0.05;
  rig.radar_clutter_rate = 2.0;
  return rig;
}

std::vector<ImuSample> synth_imu(const Trajectory& traj, const SensorRig& rig,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 1));
  std::normal_distribution<double> n01(0.0, 1.0);
  auto noise3 = [&](double s) {
    if (s == 0.0) return Vec3(Vec3::Zero());
    return Vec3(s * n01(rng), s * n01(rng), s * n01(rng));
  };
  const double dt = 1.0 / rig.imu_rate;
  const long n = std::lround(std::floor(traj.spec().duration * rig.imu_rate + 1e-9));
  std::vector<ImuSample> out;
  out.reserve(n + 1);
  Vec3 bg = rig.gyro_bias, ba = rig.accel_bias;
  for (long i = 0; i <= n; ++i) {
    const TruthSample s = traj.at(i * dt);
    if (i > 0) {
      bg += noise3(rig.gyro_bias_walk * std::sqrt(dt));
      ba += noise3(rig.accel_bias_walk * std::sqrt(dt));
    }
    ImuSample m;
    m.t = s.t;
    m.gyro = s.omega + bg + noise3(rig.gyro_noise);
    m.accel = s.R.transpose() * (s.a - kWorldGravity) + ba + noise3(rig.accel_noise);
    out.push_back(m);
  }
  return out;
}

std::vector<LidarPoint> synth_lidar(const Trajectory& traj, const Scene& scene,
                                    const SensorRig& rig, std::uint64_t seed,
                                    double t0, double t1) {
  const double col_rate = rig.lidar_rate * rig.lidar_azimuth_steps;
  const long j0 = std::lround(std::ceil(t0 * col_rate - 1e-9));
  const Extrinsic& ext = rig.extrinsics.imu_T_lidar;
  std::vector<double> ring_el(rig.lidar_rings);
  for (int r = 0; r < rig.lidar_rings; ++r) {
    ring_el[r] = rig.lidar_rings == 1
                     ? 0.0
                     : (-0.5 + static_cast<double>(r) / (rig.lidar_rings - 1)) *
                           rig.lidar_vfov_deg * kDeg;
  }
  std::vector<LidarPoint> out;
  for (long j = j0;; ++j) {
    const double t = j / col_rate;
    if (t < t0) continue;
    if (t >= t1) break;
    if (t > traj.spec().duration) break;
    const TruthSample s = traj.at(t);
    const Mat3 Rw = s.R * ext.R;
    const Vec3 origin = s.R * ext.t + s.p;
    const long step = ((j % rig.lidar_azimuth_steps) + rig.lidar_azimuth_steps) %
                      rig.lidar_azimuth_steps;
    const double az = 2.0 * kPi * step / rig.lidar_azimuth_steps - kPi;
    std::mt19937_64 rng;
    std::normal_distribution<double> n01(0.0, 1.0);
    if (rig.lidar_range_noise > 0.0) rng.seed(mix_seed(seed, 1000000 + j));
    for (int r = 0; r < rig.lidar_rings; ++r) {
      const Vec3 d_local = spherical(1.0, az, ring_el[r]);
      const auto hit = cast_ray(scene, origin, Rw * d_local, t, rig.lidar_min_range,
                                rig.lidar_max_range);
      if (!hit) continue;
      double range = hit->range;
      if (rig.lidar_range_noise > 0.0) range += rig.lidar_range_noise * n01(rng);
      LidarPoint lp;
      lp.t = t;
      lp.p = d_local * range;
      lp.label = hit->dynamic ? PointLabel::kDynamic : PointLabel::kStatic;
      out.push_back(lp);
    }
  }
  return out;
}

RadarScan synth_radar_scan(const Trajectory& traj, const Scene& scene,
                           const SensorRig& rig, std::uint64_t seed, double t) {
  const long k = std::lround(t * rig.radar_rate);
  std::mt19937_64 rng(mix_seed(seed, 5000000 + k));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);

  const TruthSample s = traj.at(t);
  const Extrinsic& ext = rig.extrinsics.imu_T_radar;
  const Mat3 Rw = s.R * ext.R;
  const Vec3 origin = s.R * ext.t + s.p;
  // Sensor velocity expressed in the radar frame.
  const Vec3 v_sensor = ext.R.transpose() * (s.R.transpose() * s.v + s.omega.cross(ext.t));

  struct Detection {
    Vec3 dir;
    double range;
    double doppler;
    bool dynamic;
  };
  std::vector<Detection> statics, dynamics;
  const double g = rig.radar_grid_deg * kDeg;
  const int n_az = std::max(1, static_cast<int>(std::round(rig.radar_hfov_deg / rig.radar_grid_deg)));
  const int n_el = std::max(1, static_cast<int>(std::round(rig.radar_vfov_deg / rig.radar_grid_deg)));
  for (int ia = 0; ia < n_az; ++ia) {
    for (int ie = 0; ie < n_el; ++ie) {
      const double az = -0.5 * rig.radar_hfov_deg * kDeg + (ia + u01(rng)) * g;
      const double el = -0.5 * rig.radar_vfov_deg * kDeg + (ie + u01(rng)) * g;
      const Vec3 d = spherical(1.0, az, el);
      const auto hit = cast_ray(scene, origin, Rw * d, t, rig.radar_min_range,
                                rig.radar_max_range);
      if (!hit) continue;
      double doppler = d.dot(v_sensor);
      if (hit->dynamic) {
        const Vec3 v_target = Rw.transpose() * scene.movers[hit->mover].velocity_at(t);
        doppler -= d.dot(v_target);
        dynamics.push_back({d, hit->range, doppler, true});
      } else {
        statics.push_back({d, hit->range, doppler, false});
      }
    }
  }

  std::poisson_distribution<int> clutter_count(std::max(rig.radar_clutter_rate, 1e-12));
  const int n_clutter = rig.radar_clutter_rate > 0.0 ? clutter_count(rng) : 0;
  const int cap = rig.radar_max_points;
  std::shuffle(dynamics.begin(), dynamics.end(), rng);
  if (static_cast<int>(dynamics.size()) > cap / 2) dynamics.resize(cap / 2);
  std::shuffle(statics.begin(), statics.end(), rng);
  const int room = std::max(0, cap - static_cast<int>(dynamics.size()) - n_clutter);
  if (static_cast<int>(statics.size()) > room) statics.resize(room);

  RadarScan scan;
  scan.t = t;
  auto emit = [&](const Detection& det) {
    double az = std::atan2(det.dir.y(), det.dir.x());
    double el = std::asin(std::clamp(det.dir.z(), -1.0, 1.0));
    double range = det.range;
    double doppler = det.doppler;
    if (rig.radar_range_noise > 0) range += rig.radar_range_noise * n01(rng);
    if (rig.radar_azimuth_noise > 0) az += rig.radar_azimuth_noise * n01(rng);
    if (rig.radar_elevation_noise > 0) el += rig.radar_elevation_noise * n01(rng);
    if (rig.radar_doppler_noise > 0) doppler += rig.radar_doppler_noise * n01(rng);
    RadarPoint rp;
    rp.p = spherical(range, az, el);
    rp.doppler = doppler;
    rp.label = det.dynamic ? PointLabel::kDynamic : PointLabel::kStatic;
    scan.points.push_back(rp);
  };
  for (const Detection& det : statics) emit(det);
  for (const Detection& det : dynamics) emit(det);
  for (int i = 0; i < n_clutter; ++i) {
    const double az = (u01(rng) - 0.5) * rig.radar_hfov_deg * kDeg;
    const double el = (u01(rng) - 0.5) * rig.radar_vfov_deg * kDeg;
    RadarPoint rp;
    rp.p = spherical(2.0 + 38.0 * u01(rng), az, el);
    rp.doppler = -5.0 + 10.0 * u01(rng);
    rp.label = PointLabel::kDynamic;
    scan.points.push_back(rp);
  }
  return scan;
}

std::vector<RadarScan> synth_radar(const Trajectory& traj, const Scene& scene,
                                   const SensorRig& rig, std::uint64_t seed) {
  std::vector<RadarScan> out;
  const long n = std::lround(std::floor(traj.spec().duration * rig.radar_rate + 1e-9));
  for (long k = 1; k <= n; ++k) {
    out.push_back(synth_radar_scan(traj, scene, rig, seed, k / rig.radar_rate));
  }
  return out;
}

namespace {

// One table drives both directions of the spec file mapping.
template <typename KV, typename Spec>
void visit_spec(KV& kv, Spec& s) {
  auto& t = s.trajectory;
  auto& sc = s.scene;
  auto& r = s.rig;
  kv("traj.duration", t.duration);
  kv("traj.speed", t.speed);
  kv("traj.size", t.size);
  kv("traj.elevation", t.elevation);
  kv("traj.stationary", t.stationary);
  kv("traj.ramp", t.ramp);
  kv("scene.ground", sc.ground);
  kv("scene.ground_height", sc.ground_height);
  kv("scene.buildings", sc.buildings);
  kv("scene.building_spacing", sc.building_spacing);
  kv("scene.clearance", sc.clearance);
  kv("scene.movers", sc.movers);
  kv("calib.imu_R_lidar", r.extrinsics.imu_T_lidar.R);
  kv("calib.imu_t_lidar", r.extrinsics.imu_T_lidar.t);
  kv("calib.imu_R_radar", r.extrinsics.imu_T_radar.R);
  kv("calib.imu_t_radar", r.extrinsics.imu_T_radar.t);
  kv("rig.imu_rate", r.imu_rate);
  kv("rig.lidar_rate", r.lidar_rate);
  kv("rig.radar_rate", r.radar_rate);
  kv("rig.gyro_noise", r.gyro_noise);
  kv("rig.accel_noise", r.accel_noise);
  kv("rig.gyro_bias", r.gyro_bias);
  kv("rig.accel_bias", r.accel_bias);
  kv("rig.gyro_bias_walk", r.gyro_bias_walk);
  kv("rig.accel_bias_walk", r.accel_bias_walk);
  kv("rig.lidar_rings", r.lidar_rings);
  kv("rig.lidar_vfov_deg", r.lidar_vfov_deg);
  kv("rig.lidar_azimuth_steps", r.lidar_azimuth_steps);
  kv("rig.lidar_range_noise", r.lidar_range_noise);
  kv("rig.lidar_min_range", r.lidar_min_range);
  kv("rig.lidar_max_range", r.lidar_max_range);
  kv("rig.radar_hfov_deg", r.radar_hfov_deg);
  kv("rig.radar_vfov_deg", r.radar_vfov_deg);
  kv("rig.radar_grid_deg", r.radar_grid_deg);
  kv("rig.radar_max_points", r.radar_max_points);
  kv("rig.radar_range_noise", r.radar_range_noise);
  kv("rig.radar_azimuth_noise", r.radar_azimuth_noise);
  kv("rig.radar_elevation_noise", r.radar_elevation_noise);
  kv("rig.radar_doppler_noise", r.radar_doppler_noise);
  kv("rig.radar_clutter_rate", r.radar_clutter_rate);
  kv("rig.radar_min_range", r.radar_min_range);
  kv("rig.radar_max_range", r.radar_max_range);
}

}  // namespace

SimulationSpec read_simulation_spec(const KeyValueFile& kv) {
  SimulationSpec s;
  std::vector<std::string> known = {"traj.family"};
  auto reader = [&](const std::string& key, auto& field) {
    known.push_back(key);
    kv.get(key, field);
  };
  visit_spec(reader, s);
  std::string family = to_string(s.trajectory.family);
  kv.get("traj.family", family);
  s.trajectory.family = parse_family(family);
  if (auto extra = kv.unknown_keys(known); !extra.empty()) {
    throw ConfigError("unknown simulation key: " + extra.front());
  }
  const SensorRig& r = s.rig;
  if (!(r.imu_rate > 0) || !(r.lidar_rate > 0) || !(r.radar_rate > 0) ||
      r.lidar_rings < 1 || r.lidar_azimuth_steps < 1 || r.radar_max_points < 1) {
    throw ConfigError("sensor rates and counts must be positive");
  }
  if (!is_rotation(r.extrinsics.imu_T_lidar.R) || !is_rotation(r.extrinsics.imu_T_radar.R)) {
    throw ConfigError("extrinsic rotation is not a rotation matrix");
  }
  return s;
}

KeyValueFile write_simulation_spec(const SimulationSpec& spec) {
  KeyValueFile kv;
  SimulationSpec s = spec;
  auto writer = [&](const std::string& key, const auto& field) { kv.set(key, field); };
  visit_spec(writer, s);
  kv.set("traj.family", to_string(spec.trajectory.family));
  return kv;
}

}  // namespace radlio
