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


#include "radlio/sweep.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "radlio/errors.hpp"

namespace radlio {

int azimuth_bin(const Vec3& p) {
  const double az = std::atan2(p.y(), p.x()) + std::numbers::pi;
  const int b = static_cast<int>(az / (2.0 * std::numbers::pi) * kAzimuthBins);
  return std::clamp(b, 0, kAzimuthBins - 1);
}

ImuSample interpolate_imu(std::span<const ImuSample> imu, double t) {
  if (imu.empty() || t < imu.front().t || t > imu.back().t) {
    throw InvalidInput("interpolate_imu: stream does not bracket t");
  }
  auto it = std::lower_bound(imu.begin(), imu.end(), t,
                             [](const ImuSample& s, double v) { return s.t < v; });
  if (it->t == t || it == imu.begin()) return *it;
  const ImuSample& a = *(it - 1);
  const ImuSample& b = *it;
  const double s = (t - a.t) / (b.t - a.t);
  return {t, (1 - s) * a.gyro + s * b.gyro, (1 - s) * a.accel + s * b.accel};
}

Sweep reconstruct_sweep(std::span<const LidarPoint> lidar_stream,
                        std::span<const ImuSample> imu_stream,
                        const RadarScan& radar, double t0, const Sweep* prev) {
  Sweep sw;
  sw.t0 = t0;
  sw.t1 = radar.t;
  if (!(sw.t1 > sw.t0)) throw InvalidInput("reconstruct_sweep: empty interval");
  sw.radar = radar;

  const bool brackets = !imu_stream.empty() && imu_stream.front().t <= t0 &&
                        imu_stream.back().t >= sw.t1;
  if (brackets) sw.imu.push_back(interpolate_imu(imu_stream, t0));
  for (const ImuSample& s : imu_stream) {
    if (s.t > t0 && s.t < sw.t1) sw.imu.push_back(s);
  }
  if (brackets) sw.imu.push_back(interpolate_imu(imu_stream, sw.t1));
  if (sw.imu.empty()) throw DataError("reconstruct_sweep: no IMU samples in interval");

  std::array<bool, kAzimuthBins> covered{};
  for (const LidarPoint& lp : lidar_stream) {
    if (lp.t < t0 || lp.t >= sw.t1) continue;
    sw.lidar.push_back(lp);
    covered[azimuth_bin(lp.p)] = true;
  }
  if (prev == nullptr) return sw;

  std::array<bool, kAzimuthBins> used{};
  for (const LidarPoint& lp : prev->compensated) {
    const int b = azimuth_bin(lp.p);
    if (covered[b]) continue;
    LidarPoint f = lp;
    f.t = t0;
    f.filled = true;
    sw.lidar.push_back(f);
    used[b] = true;
  }
  sw.filled_bins = static_cast<int>(std::count(used.begin(), used.end(), true));
  return sw;
}

std::vector<State> imu_poses(const Sweep& sweep, const State& x0, const Vec3& g) {
  std::vector<State> poses;
  poses.reserve(sweep.imu.size());
  State x = x0;
  poses.push_back(x);
  for (std::size_t i = 1; i < sweep.imu.size(); ++i) {
    const ImuSample& a = sweep.imu[i - 1];
    const ImuSample& b = sweep.imu[i];
    const double dt = b.t - a.t;
    if (dt > 0.0) {
      const ImuSample mid{a.t, 0.5 * (a.gyro + b.gyro), 0.5 * (a.accel + b.accel)};
      x = propagate_state(x, mid, g, dt);
    }
    poses.push_back(x);
  }
  return poses;
}

SE23 interpolate_pose(const Sweep& sweep, const std::vector<State>& poses,
                      double t) {
  const auto& imu = sweep.imu;
  auto it = std::lower_bound(imu.begin(), imu.end(), t,
                             [](const ImuSample& s, double v) { return s.t < v; });
  if (it == imu.begin()) return poses.front().X;
  if (it == imu.end()) return poses.back().X;
  const std::size_t i = static_cast<std::size_t>(it - imu.begin());
  const double ta = imu[i - 1].t, tb = imu[i].t;
  const double s = tb > ta ? (t - ta) / (tb - ta) : 1.0;
  const SE23& A = poses[i - 1].X;
  const SE23& B = poses[i].X;
  SE23 out;
  const Eigen::Quaterniond qa(A.R), qb(B.R);
  out.R = qa.slerp(s, qb).toRotationMatrix();
  out.v = (1 - s) * A.v + s * B.v;
  out.p = (1 - s) * A.p + s * B.p;
  return out;
}

CompensationResult motion_compensate(const Sweep& sweep, const State& x0,
                                     const Vec3& g,
                                     const Extrinsic& imu_T_lidar) {
  CompensationResult out;
  const std::vector<State> poses = imu_poses(sweep, x0, g);
  const SE23 end = interpolate_pose(sweep, poses, sweep.t1);
  const Mat3 Rend_t = end.R.transpose();
  const Extrinsic lidar_T_imu = imu_T_lidar.inverse();
  out.points.reserve(sweep.lidar.size());
  for (const LidarPoint& lp : sweep.lidar) {
    if (lp.t < sweep.t0 || lp.t > sweep.t1) {
      ++out.dropped;
      continue;
    }
    const SE23 T = interpolate_pose(sweep, poses, lp.t);
    const Vec3 world = T.R * imu_T_lidar.apply(lp.p) + T.p;
    LidarPoint c = lp;
    c.p = lidar_T_imu.apply(Rend_t * (world - end.p));
    out.points.push_back(c);
  }
  return out;
}

}  // namespace radlio
