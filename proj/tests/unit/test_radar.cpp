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

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "radlio/errors.hpp"
#include "radlio/radar.hpp"

namespace radlio {
namespace {

// Static points with directions uniform over the forward hemisphere, ranges
// 2-40 m, Doppler from the u^T v convention. The first `n_outliers` get an
// extra +3 m/s.
RadarScan make_scan(std::mt19937_64& rng, const Vec3& v, int n_static,
                    int n_outliers, double sigma = 0.0) {
  std::uniform_real_distribution<double> range(2.0, 40.0);
  std::normal_distribution<double> noise(0.0, sigma > 0 ? sigma : 1.0);
  RadarScan scan;
  scan.t = std::uniform_real_distribution<double>(0, 100)(rng);
  for (int i = 0; i < n_static + n_outliers; ++i) {
    Vec3 u = testing::random_vec3_norm(rng, 1.0);
    u.x() = std::abs(u.x());
    RadarPoint rp;
    rp.p = u * range(rng);
    rp.doppler = u.dot(v) + (sigma > 0 ? noise(rng) : 0.0);
    rp.label = PointLabel::kStatic;
    if (i < n_outliers) {
      rp.doppler += 3.0;
      rp.label = PointLabel::kDynamic;
    }
    scan.points.push_back(rp);
  }
  return scan;
}

TEST(EgoVelocity, AllZeroDoppler) {
  std::mt19937_64 rng(1);
  const RadarScan scan = make_scan(rng, Vec3::Zero(), 50, 0);
  EXPECT_LT(estimate_ego_velocity(scan).v.norm(), 1e-12);
}

TEST(EgoVelocity, ExactWithOutliers) {
  std::mt19937_64 rng(2);
  const Vec3 v_true(2.0, 0.5, -0.1);
  const RadarScan scan = make_scan(rng, v_true, 100, 40);
  const EgoVelocity ego = estimate_ego_velocity(scan);
  EXPECT_LT((ego.v - v_true).norm(), 1e-9);
  EXPECT_EQ(ego.n_inliers, 100);
  for (int i = 0; i < 40; ++i) EXPECT_FALSE(ego.inlier_mask[i]);
}

TEST(EgoVelocity, ExactOver200SeedsAt45PercentOutliers) {
  int failures = 0;
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const Vec3 v_true = testing::random_vec3(rng, 10.0);
    const RadarScan scan = make_scan(rng, v_true, 55, 45);
    if ((estimate_ego_velocity(scan).v - v_true).norm() > 1e-9) ++failures;
  }
  EXPECT_EQ(failures, 0);
}

TEST(EgoVelocity, NoisyPercentile) {
  std::vector<double> errs;
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(5000 + seed);
    const Vec3 v_true = testing::random_vec3(rng, 10.0);
    const RadarScan scan = make_scan(rng, v_true, 100, 0, 0.05);
    errs.push_back((estimate_ego_velocity(scan).v - v_true).norm());
  }
  std::sort(errs.begin(), errs.end());
  EXPECT_LT(errs[189], 0.03);
}

TEST(EgoVelocity, Deterministic) {
  std::mt19937_64 rng(3);
  const RadarScan scan = make_scan(rng, Vec3(1, 2, 3), 30, 20, 0.05);
  const EgoVelocity a = estimate_ego_velocity(scan);
  const EgoVelocity b = estimate_ego_velocity(scan);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.inlier_mask, b.inlier_mask);
}

TEST(EgoVelocity, DegenerateGeometry) {
  RadarScan scan;
  scan.points = {{Vec3(5, 0, 0), 1.0}, {Vec3(0, 5, 0), 1.0}};
  EXPECT_THROW(estimate_ego_velocity(scan), DegenerateGeometry);
  // All points along one bearing: rank 1.
  scan.points.clear();
  for (int i = 1; i < 20; ++i) scan.points.push_back({Vec3(i, i, 0), 0.3});
  EXPECT_THROW(estimate_ego_velocity(scan), DegenerateGeometry);
  // Points inside the minimum range are unusable.
  scan.points = {{Vec3(0.1, 0, 0), 0.0}, {Vec3(0, 0.2, 0), 0.0},
                 {Vec3(0, 0, 0.3), 0.0}, {Vec3(9, 0, 0), 0.0}};
  EXPECT_THROW(estimate_ego_velocity(scan), DegenerateGeometry);
}

TEST(Segmentation, ConsistentScanIsAllStatic) {
  std::mt19937_64 rng(4);
  const RadarScan scan = make_scan(rng, Vec3(3, 0, 0), 60, 0);
  const auto seg = segment_points(scan, estimate_ego_velocity(scan), 0.15);
  EXPECT_EQ(seg.static_points.size(), 60u);
  EXPECT_TRUE(seg.dynamic_points.empty());
}

TEST(Segmentation, MoverIsDynamic) {
  std::mt19937_64 rng(5);
  const Vec3 v(3, 0, 0);
  RadarScan scan = make_scan(rng, v, 60, 0);
  RadarPoint mover;
  mover.p = Vec3(10, 2, 0);
  mover.doppler = mover.p.normalized().dot(v) + 2.0;
  scan.points.push_back(mover);
  const auto seg = segment_points(scan, estimate_ego_velocity(scan), 0.15);
  ASSERT_EQ(seg.dynamic_points.size(), 1u);
  EXPECT_EQ(seg.dynamic_points[0].p, mover.p);
}

TEST(Segmentation, PartitionsTheScan) {
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(600 + seed);
    const RadarScan scan = make_scan(rng, testing::random_vec3(rng, 5.0), 40, 20, 0.05);
    const auto seg = segment_points(scan, estimate_ego_velocity(scan), 0.15);
    EXPECT_EQ(seg.static_points.size() + seg.dynamic_points.size(),
              scan.points.size());
    // Every input point appears exactly once across the two sets.
    for (const RadarPoint& rp : scan.points) {
      auto same = [&](const RadarPoint& q) { return q.p == rp.p && q.doppler == rp.doppler; };
      const auto n = std::count_if(seg.static_points.begin(), seg.static_points.end(), same) +
                     std::count_if(seg.dynamic_points.begin(), seg.dynamic_points.end(), same);
      EXPECT_EQ(n, 1);
    }
  }
}

TEST(DopplerScore, IdenticalResidualsGiveBaseVariance) {
  EgoVelocity ego;
  ego.v = Vec3(1, 0, 0);
  std::vector<RadarPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({Vec3(5, i - 5.0, 0), 0.0});
  // Shift every Doppler by the same amount -> identical residuals.
  for (auto& rp : pts) rp.doppler = rp.p.normalized().dot(ego.v) - 0.2;
  for (const DopplerNoise& dn : score_static_points(pts, ego, 0.0025, 0.0025)) {
    EXPECT_EQ(dn.z_score, 0.0);
    EXPECT_EQ(dn.variance, 0.0025);
  }
}

TEST(DopplerScore, LargeResidualIsInflated) {
  EgoVelocity ego;
  std::vector<RadarPoint> pts;
  const double resid[] = {-0.01, 0.01, -0.02, 0.02, 0.0, 0.015, -0.015, 0.2};
  for (double r : resid) pts.push_back({Vec3(5, 1, 0), -r});  // e = r
  const auto scores = score_static_points(pts, ego, 0.0025, 0.0025);
  EXPECT_GT(std::abs(scores.back().z_score), 3.5);
  EXPECT_GT(scores.back().variance, 0.0025);
  for (std::size_t i = 0; i + 1 < scores.size(); ++i) {
    EXPECT_LE(std::abs(scores[i].z_score), 3.5);
    EXPECT_EQ(scores[i].variance, 0.0025);
  }
}

TEST(DopplerScore, ThresholdIsStrict) {
  EXPECT_EQ(doppler_noise_variance(3.5, 0.0025, 0.1), 0.0025);
  EXPECT_EQ(doppler_noise_variance(-3.5, 0.0025, 0.1), 0.0025);
  EXPECT_GT(doppler_noise_variance(3.5000001, 0.0025, 0.1), 0.0025);
  // Negative scores inflate by |M| as well.
  EXPECT_DOUBLE_EQ(doppler_noise_variance(-5.0, 0.0025, 0.1), 0.0025 + 0.5);
}

TEST(DopplerScore, VarianceNeverBelowBase) {
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(700 + seed);
    const RadarScan scan = make_scan(rng, Vec3(2, 1, 0), 40, 5, 0.05);
    const EgoVelocity ego = estimate_ego_velocity(scan);
    const auto seg = segment_points(scan, ego, 0.15);
    for (const DopplerNoise& dn : score_static_points(seg.static_points, ego, 0.0025, 0.0025)) {
      EXPECT_GE(dn.variance, 0.0025);
      if (std::abs(dn.z_score) <= 3.5) EXPECT_EQ(dn.variance, 0.0025);
    }
  }
}

}  // namespace
}  // namespace radlio
