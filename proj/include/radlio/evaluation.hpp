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

#include <string>
#include <vector>

#include "radlio/dataset.hpp"
#include "radlio/gravity.hpp"
#include "radlio/pipeline.hpp"

namespace radlio {

inline constexpr double kAssociationWindow = 0.01;  // s

/// Aligned error of one associated pose, in the ground-truth frame.
struct PoseError {
  double t = 0.0;
  Vec3 translation = Vec3::Zero();  // aligned estimate minus truth, m
  Vec3 rotation = Vec3::Zero();     // Log(R_gt^T R_est) in the body frame, rad
};

struct AteResult {
  double translation_rmse = 0.0;  // m
  double rotation_rmse = 0.0;     // deg
  double vertical_rmse = 0.0;     // m, z component only
  Rot3 R = Rot3::Identity();      // gt_T_est alignment
  Vec3 t = Vec3::Zero();
  std::vector<PoseError> errors;
};

/// Associates each estimate with the nearest ground-truth stamp within
/// kAssociationWindow, aligns by least-squares rotation and translation (no
/// scale), and reports RMSE of translation and of rotation angle.
/// Throws DataError with fewer than 3 associated pairs.
AteResult ate(const TrajectoryEstimate& est, const TrajectoryEstimate& gt);

struct GravityDeviation {
  std::vector<double> series;  // rad
  double mean = 0.0;
  double std = 0.0;  // population
};

/// S^2 angle of each logged estimate to `g_init`. Throws InvalidInput on an
/// empty log.
GravityDeviation gravity_deviation(const std::vector<GravityLogRow>& log,
                                   const Vec3& g_init);

/// Writes into `dir` (created if needed):
///   trajectory.tum         estimate
///   elevation.csv          t,path_length,elevation   one row per sweep
///   errors.csv             t,ex,ey,ez,eroll,epitch,eyaw   aligned, needs gt
///   gravity.csv            t,gx,gy,gz,angle   velocity-aware estimate
///   gravity_ignorant.csv   t,gx,gy,gz,angle   pose-only baseline
///   dynamic.csv            removal counts, precision, recall; one row for
///                          all points, one for the radar field of view
/// Elevation is measured along the initialized gravity. Throws DataError.
void emit_reports(const std::string& dir, const RunResult& result,
                  const TrajectoryEstimate& gt = {});

}  // namespace radlio
