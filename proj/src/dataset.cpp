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


#include "radlio/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "radlio/errors.hpp"
#include "radlio/keyvalue.hpp"

namespace fs = std::filesystem;

namespace radlio {

namespace {

// Splits a comma or whitespace separated numeric row.
bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p >= end) break;
    double v = 0.0;
    auto [q, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) return false;
    out.push_back(v);
    p = q;
  }
  return true;
}

// Rows of a numeric CSV, skipping a non-numeric header line.
std::vector<std::vector<double>> read_rows(const fs::path& path, std::size_t min_cols) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> row;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!parse_row(line, row)) {
      if (lineno == 1) continue;  // header
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (row.empty()) continue;
    if (row.size() < min_cols) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(min_cols) + " columns");
    }
    rows.push_back(row);
  }
  return rows;
}

PointLabel label_of(const std::vector<double>& row, std::size_t col) {
  if (row.size() <= col) return PointLabel::kUnknown;
  const int v = static_cast<int>(row[col]);
  return v == 1 ? PointLabel::kStatic : v == 2 ? PointLabel::kDynamic : PointLabel::kUnknown;
}

int label_code(PointLabel l) {
  return l == PointLabel::kStatic ? 1 : l == PointLabel::kDynamic ? 2 : 0;
}

double stamp_from_filename(const fs::path& p) {
  const std::string stem = p.stem().string();
  double t = 0.0;
  auto [q, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), t);
  if (ec != std::errc() || q != stem.data() + stem.size()) {
    throw DataError("file name is not a timestamp: " + p.string());
  }
  return t;
}

std::vector<std::pair<double, fs::path>> stamped_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("missing directory: " + dir.string());
  std::vector<std::pair<double, fs::path>> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") out.emplace_back(stamp_from_filename(e.path()), e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

class DirectoryLidarSource : public LidarSource {
 public:
  explicit DirectoryLidarSource(std::vector<std::pair<double, fs::path>> files)
      : files_(std::move(files)) {}

  std::vector<LidarPoint> points(double t0, double t1) override {
    std::vector<LidarPoint> out;
    for (std::size_t i = 0; i < files_.size(); ++i) {
      const double start = files_[i].first;
      const double stop = i + 1 < files_.size() ? files_[i + 1].first
                                                : std::numeric_limits<double>::infinity();
      if (stop <= t0 || start >= t1) continue;
      for (const LidarPoint& lp : load(i)) {
        if (lp.t >= t0 && lp.t < t1) out.push_back(lp);
      }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LidarPoint& a, const LidarPoint& b) { return a.t < b.t; });
    return out;
  }

 private:
  const std::vector<LidarPoint>& load(std::size_t i) {
    if (auto it = cache_.find(i); it != cache_.end()) return it->second;
    // Sweeps advance monotonically; keep only the two most recent files.
    while (cache_.size() >= 2) cache_.erase(cache_.begin());
    std::vector<LidarPoint> pts;
    for (const auto& row : read_rows(files_[i].second, 4)) {
      LidarPoint lp;
      lp.t = row[0];
      lp.p = Vec3(row[1], row[2], row[3]);
      lp.label = label_of(row, 4);
      pts.push_back(lp);
    }
    return cache_.emplace(i, std::move(pts)).first->second;
  }

  std::vector<std::pair<double, fs::path>> files_;
  std::map<std::size_t, std::vector<LidarPoint>> cache_;
};

class SimulatedLidarSource : public LidarSource {
 public:
  SimulatedLidarSource(const SimulationSpec& spec, std::uint64_t seed)
      : traj_(spec.trajectory), rig_(spec.rig), seed_(seed) {
    scene_ = make_scene(traj_, spec.scene, seed);
  }
  std::vector<LidarPoint> points(double t0, double t1) override {
    return synth_lidar(traj_, scene_, rig_, seed_, t0, t1);
  }

 private:
  Trajectory traj_;
  SensorRig rig_;
  std::uint64_t seed_;
  Scene scene_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

}  // namespace

TrajectoryEstimate read_tum(const std::string& path) {
  TrajectoryEstimate out;
  for (const auto& row : read_rows(path, 8)) {
    TumPose p;
    p.t = row[0];
    p.p = Vec3(row[1], row[2], row[3]);
    p.q = Eigen::Quaterniond(row[7], row[4], row[5], row[6]);
    if (std::abs(p.q.norm() - 1.0) > 1e-3) throw DataError(path + ": non-unit quaternion");
    p.q.normalize();
    if (!out.empty() && !(p.t > out.back().t)) {
      throw DataError(path + ": timestamps must increase");
    }
    out.push_back(p);
  }
  return out;
}

void write_tum(const std::string& path, const TrajectoryEstimate& traj) {
  std::ostringstream os;
  for (const TumPose& p : traj) {
    os << format_double(p.t) << ' ' << format_double(p.p.x()) << ' '
       << format_double(p.p.y()) << ' ' << format_double(p.p.z()) << ' '
       << format_double(p.q.x()) << ' ' << format_double(p.q.y()) << ' '
       << format_double(p.q.z()) << ' ' << format_double(p.q.w()) << '\n';
  }
  write_text(path, os.str());
}

Dataset read_dataset(const std::string& dir_str) {
  const fs::path dir(dir_str);
  if (!fs::is_directory(dir)) throw DataError("dataset directory not found: " + dir_str);
  Dataset ds;

  for (const auto& row : read_rows(dir / "imu.csv", 7)) {
    ds.imu.push_back({row[0], Vec3(row[1], row[2], row[3]), Vec3(row[4], row[5], row[6])});
  }
  if (ds.imu.size() < 2) throw DataError("imu.csv has fewer than two samples");
  for (std::size_t i = 1; i < ds.imu.size(); ++i) {
    if (!(ds.imu[i].t > ds.imu[i - 1].t)) throw DataError("imu.csv: timestamps must increase");
  }

  for (const auto& [t, path] : stamped_files(dir / "radar")) {
    RadarScan scan;
    scan.t = t;
    for (const auto& row : read_rows(path, 4)) {
      scan.points.push_back({Vec3(row[0], row[1], row[2]), row[3], label_of(row, 4)});
    }
    ds.radar.push_back(std::move(scan));
  }
  if (ds.radar.empty()) throw DataError("no radar scans in " + (dir / "radar").string());

  auto lidar_files = stamped_files(dir / "lidar");
  if (lidar_files.empty()) throw DataError("no lidar files in " + (dir / "lidar").string());
  ds.lidar = std::make_unique<DirectoryLidarSource>(std::move(lidar_files));

  if (!fs::exists(dir / "calib.cfg")) throw DataError("missing calib.cfg");
  KeyValueFile calib;
  try {
    calib = KeyValueFile::read((dir / "calib.cfg").string());
    calib.get("imu_R_lidar", ds.extrinsics.imu_T_lidar.R);
    calib.get("imu_t_lidar", ds.extrinsics.imu_T_lidar.t);
    calib.get("imu_R_radar", ds.extrinsics.imu_T_radar.R);
    calib.get("imu_t_radar", ds.extrinsics.imu_T_radar.t);
  } catch (const ConfigError& e) {
    throw DataError(std::string("calib.cfg: ") + e.what());
  }
  if (!is_rotation(ds.extrinsics.imu_T_lidar.R, 1e-6) ||
      !is_rotation(ds.extrinsics.imu_T_radar.R, 1e-6)) {
    throw DataError("calib.cfg: extrinsic rotation is not a rotation matrix");
  }

  if (fs::exists(dir / "gt.tum")) ds.gt = read_tum((dir / "gt.tum").string());
  return ds;
}

Dataset simulated_dataset(const SimulationSpec& spec, std::uint64_t seed) {
  Dataset ds;
  const Trajectory traj(spec.trajectory);
  const Scene scene = make_scene(traj, spec.scene, seed);
  ds.imu = synth_imu(traj, spec.rig, seed);
  ds.radar = synth_radar(traj, scene, spec.rig, seed);
  ds.lidar = std::make_unique<SimulatedLidarSource>(spec, seed);
  ds.extrinsics = spec.rig.extrinsics;
  ds.gt = simulated_ground_truth(spec);
  return ds;
}

TrajectoryEstimate simulated_ground_truth(const SimulationSpec& spec) {
  const Trajectory traj(spec.trajectory);
  const long n =
      std::lround(std::floor(spec.trajectory.duration * spec.rig.radar_rate + 1e-9));
  TrajectoryEstimate gt;
  for (long k = 0; k <= n; ++k) {
    const TruthSample s = traj.at(k / spec.rig.radar_rate);
    gt.push_back({s.t, s.p, Eigen::Quaterniond(s.R)});
  }
  return gt;
}

void write_simulated_dataset(const std::string& dir_str, const SimulationSpec& spec,
                             std::uint64_t seed) {
  const fs::path dir(dir_str);
  std::error_code ec;
  fs::create_directories(dir / "lidar", ec);
  fs::create_directories(dir / "radar", ec);
  if (ec) throw DataError("cannot create dataset directory " + dir_str);

  const Trajectory traj(spec.trajectory);
  const Scene scene = make_scene(traj, spec.scene, seed);

  {
    std::ostringstream os;
    os << "t,wx,wy,wz,ax,ay,az\n";
    for (const ImuSample& s : synth_imu(traj, spec.rig, seed)) {
      os << format_double(s.t) << ',' << format_double(s.gyro.x()) << ','
         << format_double(s.gyro.y()) << ',' << format_double(s.gyro.z()) << ','
         << format_double(s.accel.x()) << ',' << format_double(s.accel.y()) << ','
         << format_double(s.accel.z()) << '\n';
    }
    write_text(dir / "imu.csv", os.str());
  }
  for (const RadarScan& scan : synth_radar(traj, scene, spec.rig, seed)) {
    std::ostringstream os;
    os << "x,y,z,doppler,label\n";
    for (const RadarPoint& rp : scan.points) {
      os << format_double(rp.p.x()) << ',' << format_double(rp.p.y()) << ','
         << format_double(rp.p.z()) << ',' << format_double(rp.doppler) << ','
         << label_code(rp.label) << '\n';
    }
    write_text(dir / "radar" / (format_double(scan.t) + ".csv"), os.str());
  }
  const double period = 1.0 / spec.rig.lidar_rate;
  const long n = std::lround(std::ceil(spec.trajectory.duration / period));
  for (long k = 0; k < n; ++k) {
    const double t0 = k * period;
    std::ostringstream os;
    os << "t,x,y,z,label\n";
    for (const LidarPoint& lp : synth_lidar(traj, scene, spec.rig, seed, t0, (k + 1) * period)) {
      os << format_double(lp.t) << ',' << format_double(lp.p.x()) << ','
         << format_double(lp.p.y()) << ',' << format_double(lp.p.z()) << ','
         << label_code(lp.label) << '\n';
    }
    write_text(dir / "lidar" / (format_double(t0) + ".csv"), os.str());
  }

  KeyValueFile calib;
  calib.set("imu_R_lidar", spec.rig.extrinsics.imu_T_lidar.R);
  calib.set("imu_t_lidar", spec.rig.extrinsics.imu_T_lidar.t);
  calib.set("imu_R_radar", spec.rig.extrinsics.imu_T_radar.R);
  calib.set("imu_t_radar", spec.rig.extrinsics.imu_T_radar.t);
  try {
    calib.write((dir / "calib.cfg").string());
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  write_tum((dir / "gt.tum").string(), simulated_ground_truth(spec));
}

}  // namespace radlio
