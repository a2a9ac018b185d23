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

#include "radlio/radar.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <random>

#include "radlio/errors.hpp"

namespace radlio {

namespace {

constexpr double kMadZero = 1e-9;

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t scan_seed(const RadarScan& scan) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(h, std::bit_cast<std::uint64_t>(scan.t));
  h = fnv1a(h, scan.points.size());
  for (const RadarPoint& rp : scan.points) {
    h = fnv1a(h, std::bit_cast<std::uint64_t>(rp.doppler));
    h = fnv1a(h, std::bit_cast<std::uint64_t>(rp.p.x()));
  }
  return h;
}

double median(std::vector<double> x) {
  const std::size_t n = x.size();
  std::nth_element(x.begin(), x.begin() + n / 2, x.end());
  const double hi = x[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(x.begin(), x.begin() + n / 2);
  return 0.5 * (lo + hi);
}

// Least squares over the masked rows; nullopt when the directions do not
// span R^3.
std::optional<Vec3> solve_masked(const std::vector<Vec3>& dirs,
                                 const std::vector<double>& dop,
                                 const std::vector<bool>& mask) {
  Mat3 A = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  int n = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (!mask[i]) continue;
    A += dirs[i] * dirs[i].transpose();
    b += dirs[i] * dop[i];
    ++n;
  }
  if (n < 3) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Mat3> es(A);
  if (es.eigenvalues()[0] < 1e-9 * std::max(1.0, es.eigenvalues()[2])) {
    return std::nullopt;
  }
  return Vec3(A.ldlt().solve(b));
}

}  // namespace

EgoVelocity estimate_ego_velocity(const RadarScan& scan,
                                  const RansacOptions& opts) {
  const std::size_t n = scan.points.size();
  std::vector<Vec3> dirs(n);
  std::vector<double> dop(n);
  std::vector<int> usable;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = scan.points[i].p.norm();
    dop[i] = scan.points[i].doppler;
    if (r > opts.min_range && std::isfinite(dop[i])) {
      dirs[i] = scan.points[i].p / r;
      usable.push_back(static_cast<int>(i));
    } else {
      dirs[i].setZero();
    }
  }
  if (usable.size() < 3) {
    throw DegenerateGeometry("ego velocity: fewer than 3 usable radar points");
  }

  auto consensus = [&](const Vec3& v, std::vector<bool>& mask, double& cost) {
    int count = 0;
    cost = 0.0;
    for (int i : usable) {
      const double e = std::abs(dirs[i].dot(v) - dop[i]);
      mask[i] = e < opts.inlier_threshold;
      if (mask[i]) {
        ++count;
        cost += e;
      }
    }
    return count;
  };

  std::mt19937_64 rng(scan_seed(scan));
  std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
  std::vector<bool> mask(n, false), best_mask(n, false);
  int best = -1;
  double best_cost = 0.0;
  // Samples needed so an all-inlier draw is missed with probability at most
  // 1 - confidence, given inlier ratio w.
  auto needed = [&](int n_in) {
    const double w = static_cast<double>(n_in) / usable.size();
    const double miss = 1.0 - w * w * w;
    if (miss <= 0.0) return 0.0;
    if (miss >= 1.0) return static_cast<double>(opts.max_iterations);
    return std::log(1.0 - opts.confidence) / std::log(miss);
  };
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (it >= opts.iterations && it >= needed(std::max(best, 0))) break;
    std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    while (b == a) b = pick(rng);
    while (c == a || c == b) c = pick(rng);
    Mat3 U;
    U.row(0) = dirs[usable[a]].transpose();
    U.row(1) = dirs[usable[b]].transpose();
    U.row(2) = dirs[usable[c]].transpose();
    if (std::abs(U.determinant()) < 1e-6) continue;
    const Vec3 v = U.partialPivLu().solve(
        Vec3(dop[usable[a]], dop[usable[b]], dop[usable[c]]));
    double cost = 0.0;
    const int count = consensus(v, mask, cost);
    if (count > best || (count == best && cost < best_cost)) {
      best = count;
      best_cost = cost;
      best_mask = mask;
    }
  }
  if (best < 3) {
    throw DegenerateGeometry("ego velocity: no well-conditioned 3-point sample");
  }

  auto v = solve_masked(dirs, dop, best_mask);
  if (!v) throw DegenerateGeometry("ego velocity: rank-deficient inlier set");
  // One re-selection pass against the least-squares estimate.
  double cost = 0.0;
  if (consensus(*v, mask, cost) >= 3) {
    if (auto refined = solve_masked(dirs, dop, mask)) {
      v = refined;
      best_mask = mask;
    }
  }

  EgoVelocity out;
  out.v = *v;
  out.inlier_mask = std::move(best_mask);
  out.n_inliers = static_cast<int>(
      std::count(out.inlier_mask.begin(), out.inlier_mask.end(), true));
  return out;
}

RadarSegmentation segment_points(const RadarScan& scan, const EgoVelocity& ego,
                                 double threshold, double min_range) {
  RadarSegmentation out;
  for (const RadarPoint& rp : scan.points) {
    const double r = rp.p.norm();
    const bool is_static =
        r > min_range &&
        std::abs(rp.p.dot(ego.v) / r - rp.doppler) <= threshold;
    (is_static ? out.static_points : out.dynamic_points).push_back(rp);
  }
  return out;
}

double doppler_noise_variance(double z_score, double base_variance,
                              double alpha) {
  const double m = std::abs(z_score);
  return m > 3.5 ? base_variance + alpha * m : base_variance;
}

std::vector<DopplerNoise> score_static_points(
    std::span<const RadarPoint> static_points, const EgoVelocity& ego,
    double base_variance, double alpha) {
  std::vector<DopplerNoise> out(static_points.size());
  if (static_points.empty()) return out;
  std::vector<double> e(static_points.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const RadarPoint& rp = static_points[i];
    e[i] = rp.p.normalized().dot(ego.v) - rp.doppler;
  }
  const double med = median(e);
  std::vector<double> dev(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) dev[i] = std::abs(e[i] - med);
  const double mad = median(dev);
  for (std::size_t i = 0; i < e.size(); ++i) {
    out[i].z_score = mad > kMadZero ? 0.6745 * (e[i] - med) / mad : 0.0;
    out[i].variance = doppler_noise_variance(out[i].z_score, base_variance, alpha);
  }
  return out;
}

}  // namespace radlio
