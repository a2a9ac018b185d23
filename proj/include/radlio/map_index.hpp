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
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "radlio/manifold.hpp"

namespace radlio {

struct Neighbor {
  Vec3 point;
  double distance = 0.0;
};

/// Static kd-tree over a point array. Exact k-nearest-neighbor queries.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  /// Appends to `out` (unsorted) the k nearest points; `out` is a max-heap
  /// ordered by distance on return.
  void knn_into(const Vec3& query, std::size_t k,
                std::vector<Neighbor>& out) const;

 private:
  struct Node {
    int begin = 0, end = 0;  // range into order_
    int left = -1, right = -1;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
  };

  int build(int begin, int end);
  void search(int node, const Vec3& q, std::size_t k,
              std::vector<Neighbor>& heap) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

struct MapIndexOptions {
  /// Voxel edge for insertion downsampling; <= 0 disables it.
  double voxel_leaf = 0.5;
  /// The tree is rebuilt once the brute-force tail exceeds
  /// max(min_pending, rebuild_fraction * tree size).
  std::size_t min_pending = 512;
  double rebuild_fraction = 0.25;
};

/// Global map: voxel-downsampled point set behind an amortized kd-tree.
/// Recently inserted points live in a linear tail until the next rebuild.
/// One writer; concurrent const queries are safe between inserts.
class MapIndex {
 public:
  explicit MapIndex(MapIndexOptions opts = {});

  /// Keeps the first point that lands in each voxel.
  void insert(std::span<const Vec3> points);
  /// Exact k nearest, ascending by distance. Fewer if the map is smaller.
  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }
  std::size_t insertions() const { return insertions_; }

 private:
  struct VoxelHash {
    std::size_t operator()(const Eigen::Vector3i& k) const {
      return (static_cast<std::size_t>(k.x()) * 73856093u) ^
             (static_cast<std::size_t>(k.y()) * 19349663u) ^
             (static_cast<std::size_t>(k.z()) * 83492791u);
    }
  };
  struct VoxelEq {
    bool operator()(const Eigen::Vector3i& a, const Eigen::Vector3i& b) const {
      return a == b;
    }
  };

  void rebuild();

  MapIndexOptions opts_;
  std::vector<Vec3> points_;
  std::unordered_map<Eigen::Vector3i, int, VoxelHash, VoxelEq> voxels_;
  KdTree tree_;
  std::size_t insertions_ = 0;
};

struct PlaneFit {
  Vec3 normal = Vec3::UnitZ();  // unit
  Vec3 centroid = Vec3::Zero();
  double rms = 0.0;
  bool valid = false;
};

struct PlaneFitOptions {
  double max_point_distance = 0.1;
  /// Points farther than this from their centroid make the fit non-local.
  double max_neighbor_distance = 5.0;
};

/// Least-squares plane through a small neighborhood (normally the 5 nearest
/// map points). The normal is the smallest-eigenvalue eigenvector of the
/// scatter matrix, sign-canonicalized (n_z >= 0, ties broken by n_x, n_y).
PlaneFit fit_plane(std::span<const Vec3> points,
                   const PlaneFitOptions& opts = {});

/// Map dump: little-endian f64 (x, y, z) records.
void write_map_dump(const std::filesystem::path& path,
                    std::span<const Vec3> points);
std::vector<Vec3> read_map_dump(const std::filesystem::path& path);

}  // namespace radlio
