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
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "radlio/map_index.hpp"

namespace radlio {
namespace {

using testing::brute_force_knn;

MapIndex unsampled_map() {
  MapIndexOptions o;
  o.voxel_leaf = 0.0;
  return MapIndex(o);
}

TEST(MapIndex, SinglePoint) {
  MapIndex m;
  const Vec3 p(1, 2, 3);
  m.insert(std::span<const Vec3>(&p, 1));
  const auto nn = m.knn(p, 1);
  ASSERT_EQ(nn.size(), 1u);
  EXPECT_EQ(nn[0].distance, 0.0);
  EXPECT_EQ(m.knn(Vec3(10, 0, 0), 5).size(), 1u);
}

TEST(MapIndex, EmptyGivesEmpty) {
  MapIndex m;
  EXPECT_TRUE(m.knn(Vec3::Zero(), 5).empty());
}

TEST(MapIndex, GridNodeFirst) {
  MapIndex m = unsampled_map();
  std::vector<Vec3> grid;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) grid.emplace_back(i, j, k);
  m.insert(grid);
  const auto nn = m.knn(Vec3(4, 5, 6), 7);
  EXPECT_EQ(nn[0].point, Vec3(4, 5, 6));
  EXPECT_EQ(nn[0].distance, 0.0);
  for (std::size_t i = 1; i < nn.size(); ++i) {
    EXPECT_DOUBLE_EQ(nn[i].distance, 1.0);
  }
}

TEST(MapIndex, VoxelKeepsFirstRepresentative) {
  MapIndex m;  // 0.5 m leaf
  const std::vector<Vec3> pts{{0.1, 0.1, 0.1}, {0.2, 0.3, 0.4}, {0.6, 0.1, 0.1}};
  m.insert(pts);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.points()[0], pts[0]);
  EXPECT_EQ(m.points()[1], pts[2]);
}

TEST(MapIndex, MatchesBruteForceAcrossIncrementalInserts) {
  std::mt19937_64 rng(3);
  MapIndex m = unsampled_map();
  for (int batch = 0; batch < 20; ++batch) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 5000; ++i) pts.push_back(testing::random_vec3(rng, 50.0));
    m.insert(pts);
    for (int q = 0; q < 10; ++q) {
      const Vec3 query = testing::random_vec3(rng, 55.0);
      const auto nn = m.knn(query, 5);
      const auto bf = brute_force_knn(m.points(), query, 5);
      ASSERT_EQ(nn.size(), bf.size());
      for (std::size_t i = 0; i < bf.size(); ++i) {
        ASSERT_DOUBLE_EQ(nn[i].distance, bf[i]);
        ASSERT_DOUBLE_EQ((nn[i].point - query).norm(), nn[i].distance);
      }
    }
  }
  EXPECT_EQ(m.size(), 100000u);
}

TEST(FitPlane, ExactPlane) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.2, 0}};
  const PlaneFit fit = fit_plane(pts);
  EXPECT_TRUE(fit.valid);
  EXPECT_LT((fit.normal - Vec3::UnitZ()).norm(), 1e-12);
  EXPECT_NEAR(fit.centroid.z(), 0.0, 1e-15);
  EXPECT_NEAR(fit.rms, 0.0, 1e-12);
}

TEST(FitPlane, CollinearIsInvalid) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {4, 4, 4}};
  EXPECT_FALSE(fit_plane(pts).valid);
}

TEST(FitPlane, ThickOrSpreadNeighborhoodsAreInvalid) {
  const std::vector<Vec3> thick{{0, 0, 0}, {1, 0, 0.3}, {0, 1, 0}, {1, 1, -0.3}, {0.5, 0.5, 0}};
  EXPECT_FALSE(fit_plane(thick).valid);
  const std::vector<Vec3> spread{{0, 0, 0}, {20, 0, 0}, {0, 20, 0}, {20, 20, 0}, {10, 10, 0}};
  EXPECT_FALSE(fit_plane(spread).valid);
}

TEST(FitPlane, NormalSignIsCanonical) {
  std::vector<Vec3> wall{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 1}, {0, 0.5, 0.3}};
  const PlaneFit fit = fit_plane(wall);
  EXPECT_LT((fit.normal - Vec3::UnitX()).norm(), 1e-12);
  std::reverse(wall.begin(), wall.end());
  EXPECT_LT((fit_plane(wall).normal - Vec3::UnitX()).norm(), 1e-12);
}

TEST(FitPlane, ResidualVanishesOnExactInputs) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Vec3 n = testing::random_vec3_norm(rng, 1.0);
    const Vec3 c = testing::random_vec3(rng, 10.0);
    const Vec3 a = n.unitOrthogonal(), b = n.cross(a);
    std::vector<Vec3> pts;
    for (int i = 0; i < 5; ++i) {
      pts.push_back(c + a * testing::random_vec3(rng, 1.0).x() +
                    b * testing::random_vec3(rng, 1.0).y());
    }
    const PlaneFit fit = fit_plane(pts);
    ASSERT_TRUE(fit.valid);
    for (const Vec3& p : pts) EXPECT_NEAR(fit.normal.dot(p - fit.centroid), 0.0, 1e-12);
  }
}

TEST(FitPlane, NoisyNormalWithinBound) {
  // 95th percentile of the normal error across Monte-Carlo trials.
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> errs;
  for (int t = 0; t < 500; ++t) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 5; ++i) pts.emplace_back(u(rng), u(rng), noise(rng));
    errs.push_back(std::acos(std::min(1.0, std::abs(fit_plane(pts).normal.z()))));
  }
  std::sort(errs.begin(), errs.end());
  EXPECT_LT(errs[474], 0.05);
}

TEST(MapDump, RoundTripsBitExact) {
  const std::vector<Vec3> pts{{1.0 / 3.0, -2.5, 1e-300}, {M_PI, 0.0, -0.0}};
  const auto path = std::filesystem::temp_directory_path() / "radlio_map_dump.bin";
  write_map_dump(path, pts);
  EXPECT_EQ(std::filesystem::file_size(path), 48u);
  const auto back = read_map_dump(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], pts[0]);
  EXPECT_EQ(back[1], pts[1]);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace radlio
