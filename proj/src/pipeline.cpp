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


#include "radlio/pipeline.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

#include "radlio/errors.hpp"
#include "radlio/map_index.hpp"
#include "radlio/simulator.hpp"
#include "radlio/sweep.hpp"

namespace radlio {

namespace {

template <typename Visitor>
void visit_config(Visitor&& f, RunConfig& c) {
  f("imu.noise_gyro", c.imu_noise.gyro);
  f("imu.noise_accel", c.imu_noise.accel);
  f("imu.noise_gyro_bias", c.imu_noise.gyro_bias);
  f("imu.noise_accel_bias", c.imu_noise.accel_bias);
  f("init.duration", c.init_duration);
  f("init.max_accel_variance", c.init_max_accel_variance);
  f("init.std_rot", c.init_std_rot);
  f("init.std_vel", c.init_std_vel);
  f("init.std_pos", c.init_std_pos);
  f("init.std_bg", c.init_std_bg);
  f("init.std_ba", c.init_std_ba);
  f("lidar.variance", c.lidar_variance);
  f("radar.doppler_variance", c.doppler_variance);
  f("radar.doppler_alpha", c.doppler_alpha);
  f("radar.ransac_threshold", c.ransac_threshold);
  f("radar.ransac_iterations", c.ransac_iterations);
  f("radar.sigma_range", c.radar_noise.sigma_range);
  f("radar.sigma_az", c.radar_noise.sigma_az);
  f("radar.sigma_el", c.radar_noise.sigma_el);
  f("radar.hfov_deg", c.radar_hfov_deg);
  f("radar.max_range", c.radar_max_range);
  f("gravity.variance", c.gravity_variance);
  f("gravity.max_iterations", c.gravity_max_iterations);
  f("removal.threshold", c.removal_threshold);
  f("map.voxel_leaf", c.map_voxel_leaf);
  f("scan.voxel_leaf", c.scan_voxel_leaf);
  f("scan.max_points", c.max_lidar_points);
  f("scan.max_range", c.lidar_max_range);
  f("plane.knn", c.knn);
  f("plane.max_point_distance", c.plane_max_point_distance);
  f("plane.max_neighbor_distance", c.plane_max_neighbor_distance);
  f("plane.gate", c.plane_gate);
  f("update.max_iterations", c.max_iterations);
  f("update.tolerance", c.tolerance);
  f("enable.gravity_residual", c.gravity_residual);
  f("enable.velocity_residual", c.velocity_residual);
  f("enable.dynamic_removal", c.dynamic_removal);
  f("check.cost", c.check_cost);
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

// First point per voxel, in input order.
std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& pts, double leaf) {
  if (leaf <= 0.0) return pts;
  struct Hash {
    std::size_t operator()(const Eigen::Vector3i& k) const {
      return (static_cast<std::size_t>(k.x()) * 73856093u) ^
             (static_cast<std::size_t>(k.y()) * 19349663u) ^
             (static_cast<std::size_t>(k.z()) * 83492791u);
    }
  };
  struct Eq {
    bool operator()(const Eigen::Vector3i& a, const Eigen::Vector3i& b) const { return a == b; }
  };
  std::unordered_set<Eigen::Vector3i, Hash, Eq> seen;
  std::vector<Vec3> out;
  for (const Vec3& p : pts) {
    const Eigen::Vector3i key = (p / leaf).array().floor().cast<int>();
    if (seen.insert(key).second) out.push_back(p);
  }
  return out;
}

void count_labels(const std::vector<LidarPoint>& pts, bool removed, DynamicStats& s) {
  for (const LidarPoint& lp : pts) {
    if (lp.filled) continue;
    if (lp.label == PointLabel::kDynamic) {
      ++(removed ? s.removed_dynamic : s.kept_dynamic);
    } else if (lp.label == PointLabel::kStatic) {
      ++(removed ? s.removed_static : s.kept_static);
    }
  }
}

bool symmetric_psd(const Covariance15& P) {
  if (!P.allFinite()) return false;
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, P.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Covariance15> es(P);
  return es.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
}

std::vector<LidarPoint> in_radar_view(const std::vector<LidarPoint>& pts,
                                      const Extrinsic& radar_T_lidar,
                                      double hfov_deg, double max_range) {
  const double half = 0.5 * hfov_deg * std::numbers::pi / 180.0;
  std::vector<LidarPoint> out;
  for (const LidarPoint& lp : pts) {
    const Vec3 q = radar_T_lidar.apply(lp.p);
    if (q.norm() <= max_range && std::abs(std::atan2(q.y(), q.x())) <= half) {
      out.push_back(lp);
    }
  }
  return out;
}

}  // namespace

void accumulate(DynamicStats& stats, const DynamicFilterResult& result) {
  count_labels(result.removed, true, stats);
  count_labels(result.kept, false, stats);
}

double DynamicStats::precision() const {
  return ratio(removed_dynamic, removed_dynamic + removed_static);
}
double DynamicStats::recall() const {
  return ratio(removed_dynamic, removed_dynamic + kept_dynamic);
}
double DynamicStats::false_removal() const {
  return removed_static + kept_static == 0
             ? 0.0
             : static_cast<double>(removed_static) / (removed_static + kept_static);
}

void validate(const RunConfig& c) {
  if (!c.imu_noise.valid()) throw ConfigError("IMU noise densities must be positive");
  if (!(c.init_duration > 0.0)) throw ConfigError("init.duration must be positive");
  for (double s : {c.init_std_rot, c.init_std_vel, c.init_std_pos, c.init_std_bg, c.init_std_ba}) {
    if (!(s > 0.0)) throw ConfigError("initial standard deviations must be positive");
  }
  for (double v : {c.lidar_variance, c.doppler_variance, c.gravity_variance}) {
    if (!(v > 0.0)) throw ConfigError("measurement variances must be positive");
  }
  if (!(c.doppler_alpha >= 0.0)) throw ConfigError("radar.doppler_alpha must be >= 0");
  if (!(c.ransac_threshold > 0.0) || c.ransac_iterations < 1) {
    throw ConfigError("RANSAC threshold and iterations must be positive");
  }
  if (!(c.removal_threshold > 0.0)) throw ConfigError("removal.threshold must be positive");
  if (!(c.radar_hfov_deg > 0.0) || !(c.radar_max_range > 0.0)) {
    throw ConfigError("radar field of view must be positive");
  }
  if (!(c.radar_noise.sigma_range > 0.0) || !(c.radar_noise.sigma_az > 0.0) ||
      !(c.radar_noise.sigma_el > 0.0)) {
    throw ConfigError("radar noise sigmas must be positive");
  }
  if (!(c.lidar_max_range > 0.0)) throw ConfigError("scan.max_range must be positive");
  if (c.max_lidar_points < 1 || c.knn < 3) {
    throw ConfigError("scan.max_points must be >= 1 and plane.knn >= 3");
  }
  if (c.max_iterations < 1 || c.gravity_max_iterations < 1 || !(c.tolerance > 0.0)) {
    throw ConfigError("iteration caps and tolerance must be positive");
  }
}

RunConfig read_run_config(const KeyValueFile& kv) {
  RunConfig c;
  std::vector<std::string> known = {"seed"};
  visit_config([&](const std::string& key, auto& field) {
    known.push_back(key);
    kv.get(key, field);
  }, c);
  kv.get("seed", c.seed);
  if (auto extra = kv.unknown_keys(known); !extra.empty()) {
    throw ConfigError("unknown config key: " + extra.front());
  }
  validate(c);
  return c;
}

KeyValueFile write_run_config(const RunConfig& cfg) {
  KeyValueFile kv;
  RunConfig c = cfg;
  visit_config([&](const std::string& key, const auto& field) { kv.set(key, field); }, c);
  kv.set("seed", std::to_string(cfg.seed));
  return kv;
}

RunResult run_pipeline(const RunConfig& cfg, const std::string& dataset_dir) {
  Dataset data = read_dataset(dataset_dir);
  return run_pipeline(cfg, data);
}

RunResult run_pipeline(const RunConfig& cfg, Dataset& data) {
  validate(cfg);
  if (data.imu.size() < 2) throw DataError("IMU stream is empty");
  if (data.radar.empty()) throw DataError("radar stream is empty");
  if (!data.lidar) throw DataError("LiDAR stream is missing");

  // Static initialization over the leading stationary window.
  const double t_init = data.imu.front().t + cfg.init_duration;
  const auto init_end = std::upper_bound(
      data.imu.begin(), data.imu.end(), t_init,
      [](double t, const ImuSample& s) { return t < s.t; });
  StaticInitOptions init_opts;
  init_opts.min_duration = 0.5 * cfg.init_duration;
  init_opts.max_accel_variance = cfg.init_max_accel_variance;
  StaticInit init;
  try {
    init = static_initialize(std::span<const ImuSample>(data.imu.begin(), init_end), init_opts);
  } catch (const InvalidInput& e) {
    throw DataError(std::string("static initialization: ") + e.what());
  } catch (const NotStationary& e) {
    throw DataError(std::string("static initialization: ") + e.what());
  }
  const Vec3 g = init.gravity;

  auto first = std::find_if(data.radar.begin(), data.radar.end(),
                            [&](const RadarScan& s) { return s.t >= t_init; });
  if (first == data.radar.end() || std::next(first) == data.radar.end()) {
    throw DataError("fewer than two radar scans after initialization");
  }

  RunResult out;
  out.g_init = g;

  State x;
  x.X.R = init.R0;
  x.bg = init.gyro_bias;
  Tangent15 sd;
  sd << Vec3::Constant(cfg.init_std_rot), Vec3::Constant(cfg.init_std_vel),
      Vec3::Constant(cfg.init_std_pos), Vec3::Constant(cfg.init_std_bg),
      Vec3::Constant(cfg.init_std_ba);
  Covariance15 P = sd.cwiseAbs2().asDiagonal();
  const Mat12 Qc = cfg.imu_noise.continuous_covariance();

  const Extrinsic& imu_T_lidar = data.extrinsics.imu_T_lidar;
  const Extrinsic& imu_T_radar = data.extrinsics.imu_T_radar;
  const Extrinsic radar_T_lidar = data.extrinsics.radar_T_lidar();

  MapIndexOptions map_opts;
  map_opts.voxel_leaf = cfg.map_voxel_leaf;
  // Thousands of queries per sweep; keep the unindexed tail short.
  map_opts.rebuild_fraction = 0.02;
  MapIndex map(map_opts);
  PlaneFitOptions plane_opts;
  plane_opts.max_point_distance = cfg.plane_max_point_distance;
  plane_opts.max_neighbor_distance = cfg.plane_max_neighbor_distance;
  RansacOptions ransac;
  ransac.iterations = cfg.ransac_iterations;
  ransac.max_iterations = std::max(ransac.max_iterations, cfg.ransac_iterations);
  ransac.inlier_threshold = cfg.ransac_threshold;
  DynamicFilterOptions removal;
  removal.threshold = cfg.removal_threshold;
  removal.noise = cfg.radar_noise;
  UpdateOptions first_opts;
  first_opts.max_iterations = cfg.max_iterations;
  first_opts.tolerance = cfg.tolerance;
  UpdateOptions second_opts = first_opts;
  second_opts.max_iterations = cfg.gravity_max_iterations;

  out.trajectory.push_back({first->t, x.p(), Eigen::Quaterniond(x.R())});

  Sweep prev;
  bool have_prev = false;
  std::uint64_t sweep_index = 0;
  for (auto it = std::next(first); it != data.radar.end(); ++it, ++sweep_index) {
    const double t0 = std::prev(it)->t;
    const std::vector<LidarPoint> stream = data.lidar->points(t0, it->t);
    Sweep sweep = reconstruct_sweep(stream, data.imu, *it, t0, have_prev ? &prev : nullptr);
    if (sweep.imu.size() < 2 || sweep.imu.front().t > t0 || sweep.imu.back().t < it->t) {
      throw DataError("IMU stream does not cover the radar interval ending at " +
                      format_double(it->t));
    }
    SweepRecord rec;
    rec.t = sweep.t1;
    rec.filled_bins = sweep.filled_bins;

    // Prediction with midpoint IMU inputs.
    const State x0 = x;
    for (std::size_t i = 1; i < sweep.imu.size(); ++i) {
      const ImuSample& a = sweep.imu[i - 1];
      const ImuSample& b = sweep.imu[i];
      const double dt = b.t - a.t;
      if (!(dt > 0.0)) continue;
      const ImuSample mid{a.t, 0.5 * (a.gyro + b.gyro), 0.5 * (a.accel + b.accel)};
      const ErrorTransition tr = error_transition(x, mid, g, dt);
      P = propagate_covariance(P, tr.Fx, tr.Fn, Qc, dt);
      x = propagate_state(x, mid, g, dt);
    }
    const State xhat = x;
    const Covariance15 Phat = P;

    std::vector<LidarPoint> compensated =
        motion_compensate(sweep, x0, g, imu_T_lidar).points;

    // Radar: ego velocity, static/dynamic split, Doppler noise.
    RadarSegmentation seg;
    std::vector<DopplerNoise> doppler;
    try {
      const EgoVelocity ego = estimate_ego_velocity(sweep.radar, ransac);
      seg = segment_points(sweep.radar, ego, cfg.ransac_threshold, ransac.min_range);
      doppler = score_static_points(seg.static_points, ego, cfg.doppler_variance,
                                    cfg.doppler_alpha);
    } catch (const DegenerateGeometry&) {
      rec.radar_degenerate = true;
      ++out.degenerate_radar_sweeps;
    }

    std::vector<LidarPoint> kept;
    if (cfg.dynamic_removal && !rec.radar_degenerate) {
      DynamicFilterResult fr =
          filter_dynamic(compensated, seg.dynamic_points, radar_T_lidar, removal);
      accumulate(out.dynamic, fr);
      count_labels(in_radar_view(fr.removed, radar_T_lidar, cfg.radar_hfov_deg,
                                 cfg.radar_max_range),
                   true, out.dynamic_in_view);
      count_labels(in_radar_view(fr.kept, radar_T_lidar, cfg.radar_hfov_deg,
                                 cfg.radar_max_range),
                   false, out.dynamic_in_view);
      kept = std::move(fr.kept);
    } else {
      kept = std::move(compensated);
      count_labels(kept, false, out.dynamic);
      count_labels(in_radar_view(kept, radar_T_lidar, cfg.radar_hfov_deg,
                                 cfg.radar_max_range),
                   false, out.dynamic_in_view);
    }

    // Residual points: voxel filter, then a seeded subsample.
    std::vector<Vec3> scan;
    scan.reserve(kept.size());
    for (const LidarPoint& lp : kept) {
      if (lp.p.norm() <= cfg.lidar_max_range) scan.push_back(lp.p);
    }
    scan = voxel_downsample(scan, cfg.scan_voxel_leaf);
    if (scan.size() > static_cast<std::size_t>(cfg.max_lidar_points)) {
      std::mt19937_64 rng(mix_seed(cfg.seed, sweep_index));
      std::shuffle(scan.begin(), scan.end(), rng);
      scan.resize(cfg.max_lidar_points);
    }

    const Vec3 gyro = sweep.imu.back().gyro;
    const bool use_radar = cfg.velocity_residual && !rec.radar_degenerate;
    const double gate2 = cfg.plane_gate * cfg.plane_gate;
    const ResidualModel model = [&](const State& xs) {
      std::vector<ResidualBlock> blocks;
      blocks.reserve(scan.size() + seg.static_points.size());
      std::vector<Vec3> nbr(cfg.knn);
      if (!map.empty()) {
        for (const Vec3& p : scan) {
          const Vec3 w = xs.R() * imu_T_lidar.apply(p) + xs.p();
          const std::vector<Neighbor> nn = map.knn(w, cfg.knn);
          if (nn.size() < static_cast<std::size_t>(cfg.knn) ||
              nn.back().distance > cfg.plane_max_neighbor_distance) {
            continue;
          }
          for (int i = 0; i < cfg.knn; ++i) nbr[i] = nn[i].point;
          const PlaneFit plane = fit_plane(nbr, plane_opts);
          if (!plane.valid) continue;
          auto b = lidar_residual(xs, p, plane, imu_T_lidar, cfg.lidar_variance);
          if (!b) continue;
          // Innovation gate against points matched to the wrong surface.
          const double s2 = (b->H * Phat * b->H.transpose())(0, 0) + cfg.lidar_variance;
          if (b->r(0) * b->r(0) <= gate2 * s2) blocks.push_back(std::move(*b));
        }
      }
      if (use_radar) {
        for (std::size_t i = 0; i < seg.static_points.size(); ++i) {
          blocks.push_back(radar_residual(xs, seg.static_points[i], gyro, imu_T_radar,
                                          doppler[i].variance));
        }
      }
      rec.lidar_residuals = static_cast<int>(blocks.size());
      if (use_radar) {
        rec.radar_residuals = static_cast<int>(seg.static_points.size());
        rec.lidar_residuals -= rec.radar_residuals;
      }
      return blocks;
    };

    UpdateResult first_stage = iterated_update(xhat, Phat, model, first_opts);
    rec.iterations = first_stage.iterations;
    if (cfg.check_cost) {
      const std::vector<ResidualBlock> b_prior = model(xhat);
      const std::vector<ResidualBlock> b_post = model(first_stage.x);
      rec.cost_prior = map_cost(xhat, xhat, Phat, b_prior);
      rec.cost_posterior = map_cost(first_stage.x, xhat, Phat, b_post);
      if (rec.cost_posterior > rec.cost_prior * (1.0 + 1e-9) + 1e-12) ++out.cost_increases;
    }
    if (first_stage.clamped || !symmetric_psd(first_stage.P)) ++out.covariance_repairs;
    x = first_stage.x;
    P = first_stage.P;

    // Gravity from the first-stage velocity, then the second stage.
    const PreintegratedVelocity pre = preintegrate_beta(sweep.imu, x0.ba, x0.bg);
    const Vec3 g_aware = estimate_gravity(x0, x, pre);
    const Vec3 g_ignorant = estimate_gravity_ignorant(x0, x, pre);
    out.gravity_aware.push_back({sweep.t1, g_aware, s2_angle(g_aware, g)});
    out.gravity_ignorant.push_back({sweep.t1, g_ignorant, s2_angle(g_ignorant, g)});
    if (cfg.gravity_residual) {
      UpdateResult second =
          second_stage_update(x, P, x0, pre, g, cfg.gravity_variance, second_opts);
      if (second.clamped || !symmetric_psd(second.P)) ++out.covariance_repairs;
      x = second.x;
      P = second.P;
    }
    if (!x.is_finite() || !P.allFinite()) {
      throw DataError("filter diverged at t = " + format_double(sweep.t1));
    }

    // Fresh points go to the map; they also fill the next sweep's gaps.
    std::vector<Vec3> world;
    prev = Sweep{};
    for (const LidarPoint& lp : kept) {
      if (lp.filled || lp.p.norm() > cfg.lidar_max_range) continue;
      world.push_back(x.R() * imu_T_lidar.apply(lp.p) + x.p());
      prev.compensated.push_back(lp);
    }
    map.insert(world);
    have_prev = true;

    out.trajectory.push_back({sweep.t1, x.p(), Eigen::Quaterniond(x.R())});
    out.sweeps.push_back(rec);
  }
  return out;
}

}  // namespace radlio
