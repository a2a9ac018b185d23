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


#include "radlio/gravity.hpp"

#include <cstdio>
#include <fstream>

#include "radlio/errors.hpp"

namespace radlio {

PreintegratedVelocity preintegrate_beta(std::span<const ImuSample> imu,
                                        const Vec3& ba, const Vec3& bg) {
  if (imu.size() < 2 || !(imu.back().t > imu.front().t)) {
    throw InvalidInput("preintegrate_beta: empty interval");
  }
  PreintegratedVelocity out;
  Mat3 R = Mat3::Identity();
  for (std::size_t i = 1; i < imu.size(); ++i) {
    const double dt = imu[i].t - imu[i - 1].t;
    if (dt <= 0.0) continue;
    const Vec3 w = 0.5 * (imu[i].gyro + imu[i - 1].gyro) - bg;
    const Vec3 a = 0.5 * (imu[i].accel + imu[i - 1].accel) - ba;
    const Mat3 R_mid = R * so3_exp(0.5 * dt * w);
    const Vec3 dv = R_mid * a * dt;
    out.alpha += out.beta * dt + 0.5 * dv * dt;
    out.beta += dv;
    R = R * so3_exp(dt * w);
  }
  out.dt = imu.back().t - imu.front().t;
  return out;
}

Vec3 estimate_gravity(const State& x0, const State& x1,
                      const PreintegratedVelocity& pre) {
  return (x1.v() - x0.v() - x0.R() * pre.beta) / pre.dt;
}

Vec3 estimate_gravity_ignorant(const State& x0, const State& x1,
                               const PreintegratedVelocity& pre) {
  const double dt = pre.dt;
  return 2.0 * (x1.p() - x0.p() - x0.v() * dt - x0.R() * pre.alpha) / (dt * dt);
}

std::optional<ResidualBlock> gravity_residual(const State& x, const State& x0,
                                              const PreintegratedVelocity& pre,
                                              const Vec3& g, double variance) {
  const Vec3 gh = estimate_gravity(x0, x, pre);
  const double n = gh.norm();
  if (!(n > 0.0) || !(g.norm() > 0.0)) return std::nullopt;
  const Vec3 gu = g.normalized();
  const Vec3 ghu = gh / n;
  // d(ĝᵤ) = (I - ĝᵤĝᵤᵀ) dĝ / |ĝ|, and x ⊞ d moves v by -v×dθ + dv.
  const Eigen::Matrix<double, 1, 3> row =
      -gu.transpose() * (Mat3::Identity() - ghu * ghu.transpose()) / (n * pre.dt);
  Eigen::Matrix<double, 1, 15> H = Eigen::Matrix<double, 1, 15>::Zero();
  H.segment<3>(idx::kRot) = -row * skew(x.v());
  H.segment<3>(idx::kVel) = row;
  return ResidualBlock::scalar(1.0 - ghu.dot(gu), H, variance, BlockTag::kGravity);
}

UpdateResult second_stage_update(const State& x1, const Covariance15& P1,
                                 const State& x0,
                                 const PreintegratedVelocity& pre,
                                 const Vec3& g, double variance,
                                 const UpdateOptions& opts) {
  auto model = [&](const State& x) {
    std::vector<ResidualBlock> blocks;
    if (auto b = gravity_residual(x, x0, pre, g, variance)) {
      blocks.push_back(std::move(*b));
    }
    return blocks;
  };
  return iterated_update(x1, P1, model, opts);
}

void write_gravity_log(const std::string& path,
                       const std::vector<GravityLogRow>& rows) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write gravity log: " + path);
  f << "t,gx,gy,gz,angle\n";
  char buf[160];
  for (const GravityLogRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9f,%.9g,%.9g,%.9g,%.9g\n", r.t,
                  r.g_est.x(), r.g_est.y(), r.g_est.z(), r.angle_to_init);
    f << buf;
  }
}

}  // namespace radlio
