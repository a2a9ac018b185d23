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


#include "radlio/evaluation.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "radlio/errors.hpp"
#include "radlio/keyvalue.hpp"

namespace fs = std::filesystem;

namespace radlio {

namespace {

// Index of the ground-truth pose nearest to t within the window, or -1.
int nearest(const TrajectoryEstimate& gt, double t) {
  auto it = std::lower_bound(gt.begin(), gt.end(), t,
                             [](const TumPose& p, double s) { return p.t < s; });
  int best = -1;
  double best_dt = kAssociationWindow;
  for (auto c : {it, it == gt.begin() ? it : std::prev(it)}) {
    if (c == gt.end()) continue;
    const double dt = std::abs(c->t - t);
    if (dt <= best_dt) {
      best_dt = dt;
      best = static_cast<int>(c - gt.begin());
    }
  }
  return best;
}

std::ofstream open_report(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

void write_vec(std::ostream& os, const Vec3& v) {
  os << format_double(v.x()) << ',' << format_double(v.y()) << ',' << format_double(v.z());
}

}  // namespace

AteResult ate(const TrajectoryEstimate& est, const TrajectoryEstimate& gt) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (int j = nearest(gt, est[i].t); j >= 0) pairs.emplace_back(static_cast<int>(i), j);
  }
  if (pairs.size() < 3) {
    throw DataError("ate: fewer than 3 associated poses (" + std::to_string(pairs.size()) + ")");
  }
  const double n = static_cast<double>(pairs.size());
  Vec3 mu_e = Vec3::Zero(), mu_g = Vec3::Zero();
  for (auto [i, j] : pairs) {
    mu_e += est[i].p;
    mu_g += gt[j].p;
  }
  mu_e /= n;
  mu_g /= n;
  Mat3 C = Mat3::Zero();
  for (auto [i, j] : pairs) C += (gt[j].p - mu_g) * (est[i].p - mu_e).transpose();
  Eigen::JacobiSVD<Mat3> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) D(2, 2) = -1.0;

  AteResult out;
  out.R = svd.matrixU() * D * svd.matrixV().transpose();
  out.t = mu_g - out.R * mu_e;
  double st = 0.0, sr = 0.0, sz = 0.0;
  for (auto [i, j] : pairs) {
    PoseError e;
    e.t = est[i].t;
    e.translation = out.R * est[i].p + out.t - gt[j].p;
    const Rot3 Re = out.R * est[i].q.toRotationMatrix();
    e.rotation = so3_log(gt[j].q.toRotationMatrix().transpose() * Re);
    st += e.translation.squaredNorm();
    sz += e.translation.z() * e.translation.z();
    sr += e.rotation.squaredNorm();
    out.errors.push_back(e);
  }
  out.translation_rmse = std::sqrt(st / n);
  out.vertical_rmse = std::sqrt(sz / n);
  out.rotation_rmse = std::sqrt(sr / n) * 180.0 / std::numbers::pi;
  return out;
}

GravityDeviation gravity_deviation(const std::vector<GravityLogRow>& log, const Vec3& g_init) {
  if (log.empty()) throw InvalidInput("gravity_deviation: empty log");
  GravityDeviation out;
  for (const GravityLogRow& r : log) out.series.push_back(s2_angle(r.g_est, g_init));
  const double n = static_cast<double>(out.series.size());
  for (double a : out.series) out.mean += a;
  out.mean /= n;
  for (double a : out.series) out.std += (a - out.mean) * (a - out.mean);
  out.std = std::sqrt(out.std / n);
  return out;
}

void emit_reports(const std::string& dir_str, const RunResult& result,
                  const TrajectoryEstimate& gt) {
  const fs::path dir(dir_str);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory " + dir_str);

  write_tum((dir / "trajectory.tum").string(), result.trajectory);

  {
    std::ofstream f = open_report(dir / "elevation.csv");
    f << "t,path_length,elevation\n";
    const Vec3 up = result.g_init.norm() > 0.0 ? Vec3(-result.g_init.normalized())
                                                : Vec3::UnitZ();
    double length = 0.0;
    for (std::size_t i = 1; i < result.trajectory.size(); ++i) {
      const TumPose& p = result.trajectory[i];
      length += (p.p - result.trajectory[i - 1].p).norm();
      f << format_double(p.t) << ',' << format_double(length) << ','
        << format_double(up.dot(p.p)) << '\n';
    }
  }

  {
    std::ofstream f = open_report(dir / "errors.csv");
    f << "t,ex,ey,ez,eroll,epitch,eyaw\n";
    if (!gt.empty()) {
      for (const PoseError& e : ate(result.trajectory, gt).errors) {
        f << format_double(e.t) << ',';
        write_vec(f, e.translation);
        f << ',';
        write_vec(f, e.rotation);
        f << '\n';
      }
    }
  }

  write_gravity_log((dir / "gravity.csv").string(), result.gravity_aware);
  write_gravity_log((dir / "gravity_ignorant.csv").string(), result.gravity_ignorant);

  {
    std::ofstream f = open_report(dir / "dynamic.csv");
    f << "region,removed_dynamic,removed_static,kept_dynamic,kept_static,precision,"
         "recall,false_removal\n";
    auto row = [&f](const char* region, const DynamicStats& d) {
      if (d.removed_dynamic + d.removed_static + d.kept_dynamic + d.kept_static == 0) return;
      f << region << ',' << d.removed_dynamic << ',' << d.removed_static << ','
        << d.kept_dynamic << ',' << d.kept_static << ',' << format_double(d.precision())
        << ',' << format_double(d.recall()) << ',' << format_double(d.false_removal())
        << '\n';
    };
    row("all", result.dynamic);
    row("radar_view", result.dynamic_in_view);
  }
}

}  // namespace radlio
