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


#include "radlio/dynamic_removal.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <unordered_map>

#include "radlio/errors.hpp"

namespace radlio {

namespace {

constexpr double kRegularization = 1e-6;

struct Gate {
  Eigen::Vector2d center;
  Eigen::Matrix2d info;
};

Gate make_gate(const Vec3& p, const Mat3& sigma) {
  Eigen::Matrix2d s = sigma.topLeftCorner<2, 2>();
  Eigen::LLT<Eigen::Matrix2d> llt(s);
  if (llt.info() != Eigen::Success || s.determinant() < 1e-18) {
    s += kRegularization * Eigen::Matrix2d::Identity();
  }
  return {p.head<2>(), s.inverse()};
}

std::uint64_t cell_key(long ix, long iy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
         static_cast<std::uint32_t>(iy);
}

}  // namespace

Mat3 point_uncertainty(const Vec3& p, const RadarNoiseModel& noise) {
  const double r = p.norm();
  if (!(r > 0.0)) throw InvalidInput("point_uncertainty: zero-range point");
  const Vec3 e_r = p / r;
  Vec3 e_az = Vec3::UnitZ().cross(e_r);
  if (e_az.norm() < 1e-9) e_az = Vec3::UnitY();  // straight up or down
  e_az.normalize();
  const Vec3 e_el = e_r.cross(e_az);
  Mat3 B;
  B << e_r, e_az, e_el;
  const Vec3 d(noise.sigma_range * noise.sigma_range,
               std::pow(r * noise.sigma_az, 2), std::pow(r * noise.sigma_el, 2));
  return B * d.asDiagonal() * B.transpose();
}

double mahalanobis_2d(const Vec3& p_radar, const Vec3& p_lidar,
                      const Mat3& sigma) {
  const Gate g = make_gate(p_radar, sigma);
  const Eigen::Vector2d delta = g.center - p_lidar.head<2>();
  return delta.dot(g.info * delta);
}

DynamicFilterResult filter_dynamic(std::span<const LidarPoint> lidar,
                                   std::span<const RadarPoint> dynamic_points,
                                   const Extrinsic& radar_T_lidar,
                                   const DynamicFilterOptions& opts) {
  DynamicFilterResult out;
  if (dynamic_points.empty()) {
    out.kept.assign(lidar.begin(), lidar.end());
    return out;
  }

  // Each gate is registered in every cell its bounding box touches, so a
  // query only inspects the cell of the LiDAR point.
  std::vector<Gate> gates;
  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  const double cs = opts.cell_size;
  for (const RadarPoint& rp : dynamic_points) {
    if (!(rp.p.norm() > 0.0)) continue;
    const Gate g = make_gate(rp.p, point_uncertainty(rp.p, opts.noise));
    // Extent of {d : d^T S^-1 d < eps} along axis i is sqrt(eps * S_ii).
    const Eigen::Matrix2d S = g.info.inverse();
    const double hx = std::sqrt(opts.threshold * S(0, 0));
    const double hy = std::sqrt(opts.threshold * S(1, 1));
    const int id = static_cast<int>(gates.size());
    gates.push_back(g);
    const long x0 = std::lround(std::floor((g.center.x() - hx) / cs));
    const long x1 = std::lround(std::floor((g.center.x() + hx) / cs));
    const long y0 = std::lround(std::floor((g.center.y() - hy) / cs));
    const long y1 = std::lround(std::floor((g.center.y() + hy) / cs));
    for (long ix = x0; ix <= x1; ++ix) {
      for (long iy = y0; iy <= y1; ++iy) grid[cell_key(ix, iy)].push_back(id);
    }
  }

  for (const LidarPoint& lp : lidar) {
    const Vec3 q = radar_T_lidar.apply(lp.p);
    bool dynamic = false;
    const long ix = std::lround(std::floor(q.x() / cs));
    const long iy = std::lround(std::floor(q.y() / cs));
    if (auto it = grid.find(cell_key(ix, iy)); it != grid.end()) {
      for (int id : it->second) {
        const Eigen::Vector2d d = gates[id].center - q.head<2>();
        if (d.dot(gates[id].info * d) < opts.threshold) {
          dynamic = true;
          break;
        }
      }
    }
    (dynamic ? out.removed : out.kept).push_back(lp);
  }
  return out;
}

}  // namespace radlio
