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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radlio/manifold.hpp"
#include "radlio/state.hpp"
#include "radlio/update.hpp"

namespace radlio {

/// Bias-corrected specific force integrated over an interval, expressed in
/// the body frame at its start: beta = ∫ R a dt, alpha = ∫∫ R a dt dt.
struct PreintegratedVelocity {
  Vec3 beta = Vec3::Zero();
  Vec3 alpha = Vec3::Zero();
  double dt = 0.0;
};

/// Midpoint integration over consecutive samples; the interval runs from the
/// first to the last sample stamp.
PreintegratedVelocity preintegrate_beta(std::span<const ImuSample> imu,
                                        const Vec3& ba, const Vec3& bg);

/// Gravity from velocity kinematics, v1 = v0 + R0 beta + g dt.
Vec3 estimate_gravity(const State& x0, const State& x1,
                      const PreintegratedVelocity& pre);

/// Gravity from position kinematics only,
/// p1 = p0 + v0 dt + g dt^2 / 2 + R0 alpha.
Vec3 estimate_gravity_ignorant(const State& x0, const State& x1,
                               const PreintegratedVelocity& pre);

/// Cosine residual 1 - ĝᵤ·gᵤ, where ĝ is recomputed from the velocity of `x`
/// (taken as the state at the end of the interval). Returns nullopt when ĝ
/// vanishes.
std::optional<ResidualBlock> gravity_residual(const State& x, const State& x0,
                                              const PreintegratedVelocity& pre,
                                              const Vec3& g, double variance);

/// Iterated update with the gravity residual alone. The state at the start of
/// the interval and the preintegration stay fixed across iterations.
UpdateResult second_stage_update(const State& x1, const Covariance15& P1,
                                 const State& x0,
                                 const PreintegratedVelocity& pre,
                                 const Vec3& g, double variance,
                                 const UpdateOptions& opts = {});

struct GravityLogRow {
  double t = 0.0;
  Vec3 g_est = Vec3::Zero();
  double angle_to_init = 0.0;  // rad
};

/// CSV with header t,gx,gy,gz,angle. Throws DataError if unwritable.
void write_gravity_log(const std::string& path,
                       const std::vector<GravityLogRow>& rows);

}  // namespace radlio
