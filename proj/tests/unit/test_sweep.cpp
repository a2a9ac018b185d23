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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "radlio/errors.hpp"
#include "radlio/sweep.hpp"

namespace radlio {
namespace {

const Vec3 kGravity(0, 0, -9.81);

// Constant body gyro/accel at 200 Hz over [t0, t1].
std::vector<ImuSample> constant_imu(double t0, double t1, const Vec3& gyro,
                                    const Vec3& accel) {
  std::vector<ImuSample> out;
  for (int i = 0; t0 + 0.005 * i <= t1 + 1e-12; ++i) {
    out.push_back({t0 + 0.005 * i, gyro, accel});
  }
  return out;
}

// Ring of points, one per degree, stamps spread over [t0, t1).
std::vector<LidarPoint> ring(double t0, double t1, double skip_lo = 1,
                             double skip_hi = 0) {
  std::vector<LidarPoint> out;
  for (int i = 0; i < 360; ++i) {
    const double az = (i + 0.5) * std::numbers::pi / 180.0 - std::numbers::pi;
    const double deg = az * 180.0 / std::numbers::pi;
    if (deg >= skip_lo && deg < skip_hi) continue;
    LidarPoint lp;
    lp.t = t0 + (t1 - t0) * i / 360.0;
    lp.p = Vec3(10 * std::cos(az), 10 * std::sin(az), 0.3);
    out.push_back(lp);
  }
  return out;
}

TEST(Sweep, AzimuthBinCoversCircle) {
  EXPECT_EQ(azimuth_bin(Vec3(-1, -1e-9, 0)), 0);
  EXPECT_EQ(azimuth_bin(Vec3(1, 0, 0)), kAzimuthBins / 2);
  EXPECT_EQ(azimuth_bin(Vec3(-1, 1e-9, 0)), kAzimuthBins - 1);
}

TEST(Sweep, FullCoverageIsPassThrough) {
  const auto imu = constant_imu(0.0, 0.2, Vec3::Zero(), -kGravity);
  const auto lidar = ring(0.0, 0.1);
  RadarScan radar;
  radar.t = 0.1;
  Sweep prev;
  prev.compensated = ring(0.0, 0.0);
  const Sweep sw = reconstruct_sweep(lidar, imu, radar, 0.0, &prev);
  ASSERT_EQ(sw.lidar.size(), lidar.size());
  EXPECT_EQ(sw.filled_bins, 0);
  for (std::size_t i = 0; i < lidar.size(); ++i) {
    EXPECT_EQ(sw.lidar[i].p, lidar[i].p);
    EXPECT_FALSE(sw.lidar[i].filled);
  }
  EXPECT_EQ(sw.imu.front().t, 0.0);
  EXPECT_EQ(sw.imu.back().t, 0.1);
  EXPECT_TRUE(sw.radar.points.empty());
}

TEST(Sweep, MissingSectorIsFilledFromPrevious) {
  const auto imu = constant_imu(0.0, 0.3, Vec3::Zero(), -kGravity);
  const auto lidar = ring(0.1, 0.2, 30.0, 60.0);
  RadarScan radar;
  radar.t = 0.2;
  Sweep prev;
  prev.compensated = ring(0.0, 0.1);
  for (auto& lp : prev.compensated) lp.p *= 1.01;  // tells the sources apart
  const Sweep sw = reconstruct_sweep(lidar, imu, radar, 0.1, &prev);
  EXPECT_EQ(sw.filled_bins, 3);
  int filled = 0;
  for (const LidarPoint& lp : sw.lidar) {
    const double deg = std::atan2(lp.p.y(), lp.p.x()) * 180.0 / std::numbers::pi;
    const bool in_gap = deg >= 30.0 && deg < 60.0;
    EXPECT_EQ(lp.filled, in_gap);
    EXPECT_EQ(lp.p.norm() > 10.05, in_gap);
    if (lp.filled) {
      EXPECT_EQ(lp.t, 0.1);
      ++filled;
    }
  }
  EXPECT_EQ(filled, 30);
}

TEST(Sweep, NoImuThrows) {
  RadarScan radar;
  radar.t = 1.0;
  EXPECT_THROW(reconstruct_sweep(ring(0.9, 1.0), {}, radar, 0.9), DataError);
}

TEST(Sweep, Deterministic) {
  const auto imu = constant_imu(0.0, 0.3, Vec3(0, 0, 0.5), -kGravity);
  RadarScan radar;
  radar.t = 0.2;
  Sweep prev;
  prev.compensated = ring(0.0, 0.1);
  const Sweep a = reconstruct_sweep(ring(0.1, 0.2, -90, 0), imu, radar, 0.1, &prev);
  const Sweep b = reconstruct_sweep(ring(0.1, 0.2, -90, 0), imu, radar, 0.1, &prev);
  ASSERT_EQ(a.lidar.size(), b.lidar.size());
  for (std::size_t i = 0; i < a.lidar.size(); ++i) {
    EXPECT_EQ(a.lidar[i].p, b.lidar[i].p);
    EXPECT_EQ(a.lidar[i].t, b.lidar[i].t);
  }
}

Sweep make_sweep(const std::vector<ImuSample>& imu, std::vector<LidarPoint> lidar,
                 double t0, double t1) {
  RadarScan radar;
  radar.t = t1;
  Sweep sw = reconstruct_sweep({}, imu, radar, t0);
  sw.lidar = std::move(lidar);
  return sw;
}

TEST(MotionCompensation, StationaryLeavesPointsUnchanged) {
  const auto imu = constant_imu(0.0, 0.2, Vec3::Zero(), -kGravity);
  const Sweep sw = make_sweep(imu, ring(0.0, 0.1), 0.0, 0.1);
  std::mt19937_64 rng(1);
  const Extrinsic ext{so3_exp(testing::random_vec3(rng, 0.5)), Vec3(0.1, 0.2, 0.3)};
  State x0;
  x0.X.R = Mat3::Identity();
  // Body must carry gravity-cancelling specific force in its own frame.
  const auto res = motion_compensate(sw, x0, kGravity, ext);
  ASSERT_EQ(res.points.size(), sw.lidar.size());
  for (std::size_t i = 0; i < sw.lidar.size(); ++i) {
    EXPECT_LT((res.points[i].p - sw.lidar[i].p).norm(), 1e-9);
  }
}

TEST(MotionCompensation, ConstantVelocityShift) {
  const auto imu = constant_imu(0.0, 0.2, Vec3::Zero(), -kGravity);
  LidarPoint lp;
  lp.t = 0.05;
  lp.p = Vec3(5, 1, 0);
  const Sweep sw = make_sweep(imu, {lp}, 0.0, 0.1);
  State x0;
  x0.X.v = Vec3(1, 0, 0);
  const auto res = motion_compensate(sw, x0, kGravity, Extrinsic{});
  ASSERT_EQ(res.points.size(), 1u);
  // The sensor moves 0.05 m forward after the point is taken.
  EXPECT_LT((res.points[0].p - Vec3(4.95, 1, 0)).norm(), 1e-9);
}

TEST(MotionCompensation, PureYawRotationLandsOnScene) {
  const double w = 1.0;
  const auto imu = constant_imu(0.0, 0.2, Vec3(0, 0, w), -kGravity);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  std::vector<LidarPoint> lidar;
  std::vector<Vec3> world;
  for (int i = 0; i < 200; ++i) {
    // Points on the plane x = 8 in the world (initial body) frame.
    const Vec3 pw(8.0, std::uniform_real_distribution<double>(-5, 5)(rng),
                  std::uniform_real_distribution<double>(-1, 2)(rng));
    LidarPoint lp;
    lp.t = u(rng);
    lp.p = so3_exp(Vec3(0, 0, w * lp.t)).transpose() * pw;
    lidar.push_back(lp);
    world.push_back(pw);
  }
  const Sweep sw = make_sweep(imu, lidar, 0.0, 0.1);
  const auto res = motion_compensate(sw, State{}, kGravity, Extrinsic{});
  const Mat3 R_end = so3_exp(Vec3(0, 0, w * 0.1));
  for (std::size_t i = 0; i < lidar.size(); ++i) {
    EXPECT_LT(std::abs((R_end * res.points[i].p).x() - 8.0), 1e-3);
    EXPECT_LT((R_end * res.points[i].p - world[i]).norm(), 1e-3);
  }
}

TEST(MotionCompensation, AcceleratingWithExtrinsic) {
  // Constant world acceleration, no rotation, non-trivial mounting.
  const Vec3 a(1.5, -0.5, 0.2);
  const auto imu = constant_imu(0.0, 0.2, Vec3::Zero(), a - kGravity);
  const Extrinsic ext{so3_exp(Vec3(0.1, -0.2, 0.3)), Vec3(0.4, 0.0, -0.1)};
  const Vec3 v0(3, 1, 0);
  auto pos = [&](double t) { return v0 * t + 0.5 * a * t * t; };
  std::mt19937_64 rng(3);
  std::vector<LidarPoint> lidar;
  std::vector<Vec3> world;
  for (int i = 0; i < 100; ++i) {
    const Vec3 pw = testing::random_vec3(rng, 20.0);
    LidarPoint lp;
    lp.t = 0.001 * i;
    lp.p = ext.inverse().apply(pw - pos(lp.t));
    lidar.push_back(lp);
    world.push_back(pw);
  }
  State x0;
  x0.X.v = v0;
  const Sweep sw = make_sweep(imu, lidar, 0.0, 0.1);
  const auto res = motion_compensate(sw, x0, kGravity, ext);
  // Linear interpolation between 5 ms poses misses the parabola by at most
  // |a| dt^2 / 8.
  const double bound = a.norm() * 0.005 * 0.005 / 8.0 + 1e-9;
  for (std::size_t i = 0; i < lidar.size(); ++i) {
    EXPECT_LT((ext.apply(res.points[i].p) + pos(0.1) - world[i]).norm(), bound);
  }
}

TEST(MotionCompensation, OutOfIntervalPointsAreDropped) {
  const auto imu = constant_imu(0.0, 0.2, Vec3::Zero(), -kGravity);
  auto lidar = ring(0.0, 0.1);
  lidar[0].t = -0.01;
  lidar[1].t = 0.15;
  const Sweep sw = make_sweep(imu, lidar, 0.0, 0.1);
  const auto res = motion_compensate(sw, State{}, kGravity, Extrinsic{});
  EXPECT_EQ(res.dropped, 2);
  EXPECT_EQ(res.points.size(), lidar.size() - 2);
}

}  // namespace
}  // namespace radlio
