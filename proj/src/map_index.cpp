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

#include "radlio/map_index.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

#include "radlio/errors.hpp"

namespace radlio {

namespace {

constexpr int kLeafSize = 8;

bool farther(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance;
}

void push_candidate(const Vec3& p, double d, std::size_t k,
                    std::vector<Neighbor>& heap) {
  if (heap.size() < k) {
    heap.push_back({p, d});
    std::push_heap(heap.begin(), heap.end(), farther);
  } else if (d < heap.front().distance) {
    std::pop_heap(heap.begin(), heap.end(), farther);
    heap.back() = {p, d};
    std::push_heap(heap.begin(), heap.end(), farther);
  }
}

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<int>(points_.size()));
  }
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& n = nodes_[id];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

void KdTree::search(int node, const Vec3& q, std::size_t k,
                    std::vector<Neighbor>& heap) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const Vec3& p = points_[order_[i]];
      push_candidate(p, (p - q).norm(), k, heap);
    }
    return;
  }
  const double diff = q[n.axis] - n.split;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, q, k, heap);
  if (heap.size() < k || std::abs(diff) <= heap.front().distance) {
    search(far, q, k, heap);
  }
}

void KdTree::knn_into(const Vec3& query, std::size_t k,
                      std::vector<Neighbor>& out) const {
  if (nodes_.empty() || k == 0) return;
  search(0, query, k, out);
}

MapIndex::MapIndex(MapIndexOptions opts) : opts_(opts) {}

void MapIndex::insert(std::span<const Vec3> points) {
  for (const Vec3& p : points) {
    if (!p.allFinite()) {
      throw InvalidInput("MapIndex::insert: non-finite point");
    }
    if (opts_.voxel_leaf > 0.0) {
      const Eigen::Vector3i key = (p / opts_.voxel_leaf).array().floor().cast<int>();
      if (!voxels_.emplace(key, static_cast<int>(points_.size())).second) {
        continue;
      }
    }
    points_.push_back(p);
    ++insertions_;
  }
  const std::size_t pending = points_.size() - tree_.size();
  const auto threshold = std::max<std::size_t>(
      opts_.min_pending,
      static_cast<std::size_t>(opts_.rebuild_fraction * tree_.size()));
  if (pending > threshold) rebuild();
}

void MapIndex::rebuild() { tree_ = KdTree(points_); }

std::vector<Neighbor> MapIndex::knn(const Vec3& query, std::size_t k) const {
  std::vector<Neighbor> heap;
  heap.reserve(k + 1);
  tree_.knn_into(query, k, heap);
  for (std::size_t i = tree_.size(); i < points_.size(); ++i) {
    push_candidate(points_[i], (points_[i] - query).norm(), k, heap);
  }
  std::sort_heap(heap.begin(), heap.end(), farther);
  return heap;
}

PlaneFit fit_plane(std::span<const Vec3> points, const PlaneFitOptions& opts) {
  PlaneFit fit;
  if (points.size() < 3) return fit;

  Vec3 c = Vec3::Zero();
  for (const Vec3& p : points) c += p;
  c /= static_cast<double>(points.size());
  Mat3 S = Mat3::Zero();
  for (const Vec3& p : points) S += (p - c) * (p - c).transpose();

  Eigen::SelfAdjointEigenSolver<Mat3> es(S);
  const Vec3 ev = es.eigenvalues();  // ascending
  fit.centroid = c;
  Vec3 n = es.eigenvectors().col(0).normalized();
  if (n.z() < 0.0 || (n.z() == 0.0 && (n.x() < 0.0 || (n.x() == 0.0 && n.y() < 0.0)))) {
    n = -n;
  }
  fit.normal = n;

  // Collinear (or coincident) neighborhoods have two vanishing eigenvalues.
  if (!(ev[1] > 1e-10 * std::max(ev[2], 1e-300)) || ev[2] <= 0.0) return fit;

  double sq = 0.0, worst = 0.0, spread = 0.0;
  for (const Vec3& p : points) {
    const double d = n.dot(p - c);
    sq += d * d;
    worst = std::max(worst, std::abs(d));
    spread = std::max(spread, (p - c).norm());
  }
  fit.rms = std::sqrt(sq / static_cast<double>(points.size()));
  fit.valid = worst < opts.max_point_distance &&
              spread <= opts.max_neighbor_distance;
  return fit;
}

void write_map_dump(const std::filesystem::path& path,
                    std::span<const Vec3> points) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open map dump for writing: " + path.string());
  for (const Vec3& p : points) {
    for (int i = 0; i < 3; ++i) {
      auto bits = std::bit_cast<std::uint64_t>(p[i]);
      unsigned char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
      os.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
}

std::vector<Vec3> read_map_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open map dump: " + path.string());
  std::vector<Vec3> out;
  unsigned char bytes[24];
  while (is.read(reinterpret_cast<char*>(bytes), 24)) {
    Vec3 p;
    for (int i = 0; i < 3; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(bytes[8 * i + b]) << (8 * b);
      }
      p[i] = std::bit_cast<double>(bits);
    }
    out.push_back(p);
  }
  if (is.gcount() != 0) throw DataError("truncated map dump: " + path.string());
  return out;
}

}  // namespace radlio
