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
#include <span>
#include <vector>

#include "radlio/sensor_types.hpp"

namespace radlio {

struct EgoVelocity {
  Vec3 v = Vec3::Zero();  // radar frame, m/s
  std::vector<bool> inlier_mask;
  int n_inliers = 0;
};

struct RansacOptions {
  /// 99% confidence at 40% outliers for 3-point samples. This is a floor:
  /// sampling continues while the best consensus so far leaves the chance of
  /// never drawing an all-inlier sample above 1 - `confidence`.
  int iterations = 34;
  int max_iterations = 400;
  double confidence = 1.0 - 1e-6;
  double inlier_threshold = 0.15;  // m/s, 3 sigma of Doppler noise
  double min_range = 0.5;          // m
};

/// Radar ego-velocity from Doppler. Measurement model for a static point:
/// doppler = u(p)^T v. 3-point RANSAC followed by least squares over the
/// consensus set. The sampler is seeded from a hash of the scan contents, so
/// identical scans give identical results.
/// Throws DegenerateGeometry for < 3 usable points or a rank-deficient
/// consensus set.
EgoVelocity estimate_ego_velocity(const RadarScan& scan,
                                  const RansacOptions& opts = {});

struct RadarSegmentation {
  std::vector<RadarPoint> static_points;
  std::vector<RadarPoint> dynamic_points;  // movers and noise
};

/// Static iff |u^T v - doppler| <= threshold (and beyond the minimum range).
RadarSegmentation segment_points(const RadarScan& scan, const EgoVelocity& ego,
                                 double threshold, double min_range = 0.5);

struct DopplerNoise {
  double z_score = 0.0;   // modified z-score M_j
  double variance = 0.0;  // R_j, (m/s)^2
};

/// R_v + alpha |M| when |M| > 3.5, else R_v.
double doppler_noise_variance(double z_score, double base_variance,
                              double alpha);

/// Modified z-score of each static point's Doppler residual
/// e = u^T v - doppler: M = 0.6745 (e - median) / MAD. A vanishing MAD
/// yields M = 0 everywhere.
std::vector<DopplerNoise> score_static_points(
    std::span<const RadarPoint> static_points, const EgoVelocity& ego,
    double base_variance, double alpha);

}  // namespace radlio
