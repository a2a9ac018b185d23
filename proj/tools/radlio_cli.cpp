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


// Command-line front end: run, simulate, eval, gravity-compare.
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "radlio/dataset.hpp"
#include "radlio/errors.hpp"
#include "radlio/evaluation.hpp"
#include "radlio/keyvalue.hpp"
#include "radlio/pipeline.hpp"
#include "radlio/simulator.hpp"

namespace {

using namespace radlio;

constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;

RunConfig load_config(const std::string& path, const std::vector<std::string>& disabled) {
  RunConfig cfg = path.empty() ? RunConfig{} : read_run_config(KeyValueFile::read(path));
  for (const std::string& d : disabled) {
    if (d == "gravity") {
      cfg.gravity_residual = false;
    } else if (d == "velocity") {
      cfg.velocity_residual = false;
    } else if (d == "dynamic") {
      cfg.dynamic_removal = false;
    } else {
      throw ConfigError("unknown stage to disable: " + d);
    }
  }
  return cfg;
}

SimulationSpec load_spec(const std::string& path) {
  return path.empty() ? SimulationSpec{} : read_simulation_spec(KeyValueFile::read(path));
}

void print_summary(const RunResult& r, const TrajectoryEstimate& gt, double seconds) {
  std::printf("sweeps %zu  degenerate_radar %d  covariance_repairs %d  time %.1f s\n",
              r.sweeps.size(), r.degenerate_radar_sweeps, r.covariance_repairs, seconds);
  if (!gt.empty()) {
    const AteResult a = ate(r.trajectory, gt);
    std::printf("ATE_t %.6f m  ATE_r %.6f deg  vertical %.6f m\n", a.translation_rmse,
                a.rotation_rmse, a.vertical_rmse);
  }
  if (!r.gravity_aware.empty()) {
    const GravityDeviation aw = gravity_deviation(r.gravity_aware, r.g_init);
    const GravityDeviation ig = gravity_deviation(r.gravity_ignorant, r.g_init);
    std::printf("gravity deviation aware %.6f (std %.6f)  ignorant %.6f (std %.6f) rad\n",
                aw.mean, aw.std, ig.mean, ig.std);
  }
  auto dyn = [](const char* what, const DynamicStats& d) {
    if (d.removed_dynamic + d.kept_dynamic + d.removed_static == 0) return;
    std::printf("dynamic removal (%s) precision %.4f  recall %.4f  false_removal %.5f\n",
                what, d.precision(), d.recall(), d.false_removal());
  };
  dyn("all", r.dynamic);
  dyn("radar view", r.dynamic_in_view);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radar-inertial-LiDAR odometry"};
  app.require_subcommand(1);

  std::string config_path, data_dir, out_dir, spec_path, est_path, gt_path, csv_path;
  std::vector<std::string> disabled;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "Run the estimator on a dataset directory");
  run->add_option("--config", config_path, "key=value configuration file");
  run->add_option("--data", data_dir, "dataset directory");
  run->add_option("--spec", spec_path, "simulate in memory from this spec instead of --data");
  run->add_option("--seed", seed, "simulation seed with --spec");
  run->add_option("--out", out_dir, "report directory")->required();
  run->add_option("--disable", disabled, "gravity|velocity|dynamic")->take_all();

  CLI::App* sim = app.add_subcommand("simulate", "Write a synthetic dataset directory");
  sim->add_option("--spec", spec_path, "simulation spec file (defaults when omitted)");
  sim->add_option("--out", out_dir, "dataset directory")->required();
  sim->add_option("--seed", seed, "random seed");

  CLI::App* eval = app.add_subcommand("eval", "ATE of an estimate against ground truth");
  eval->add_option("--est", est_path, "estimate, TUM format")->required();
  eval->add_option("--gt", gt_path, "ground truth, TUM format")->required();

  CLI::App* grav = app.add_subcommand(
      "gravity-compare", "Velocity-aware vs pose-only gravity deviation per sweep");
  grav->add_option("--config", config_path, "key=value configuration file");
  grav->add_option("--data", data_dir, "dataset directory")->required();
  grav->add_option("--out", csv_path, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (run->parsed()) {
      if (data_dir.empty() == spec_path.empty()) {
        throw ConfigError("run needs exactly one of --data or --spec");
      }
      const RunConfig cfg = load_config(config_path, disabled);
      const auto start = std::chrono::steady_clock::now();
      RunResult result;
      TrajectoryEstimate gt;
      if (!data_dir.empty()) {
        Dataset data = read_dataset(data_dir);
        gt = data.gt;
        result = run_pipeline(cfg, data);
      } else {
        Dataset data = simulated_dataset(load_spec(spec_path), seed);
        gt = data.gt;
        result = run_pipeline(cfg, data);
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      emit_reports(out_dir, result, gt);
      print_summary(result, gt, secs);
    } else if (sim->parsed()) {
      write_simulated_dataset(out_dir, load_spec(spec_path), seed);
    } else if (eval->parsed()) {
      const AteResult a = ate(read_tum(est_path), read_tum(gt_path));
      std::printf("pairs %zu\nATE_t %.6f m\nATE_r %.6f deg\n", a.errors.size(),
                  a.translation_rmse, a.rotation_rmse);
    } else if (grav->parsed()) {
      const RunResult r = run_pipeline(load_config(config_path, {}), data_dir);
      if (r.gravity_aware.empty()) throw DataError("no sweeps processed");
      const GravityDeviation aw = gravity_deviation(r.gravity_aware, r.g_init);
      const GravityDeviation ig = gravity_deviation(r.gravity_ignorant, r.g_init);
      std::ofstream f(csv_path);
      if (!f) throw DataError("cannot write " + csv_path);
      f << "t,aware,ignorant\n";
      for (std::size_t i = 0; i < aw.series.size(); ++i) {
        f << format_double(r.gravity_aware[i].t) << ',' << format_double(aw.series[i]) << ','
          << format_double(ig.series[i]) << '\n';
      }
      std::printf("aware mean %.6f std %.6f rad\nignorant mean %.6f std %.6f rad\n", aw.mean,
                  aw.std, ig.mean, ig.std);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataExit;
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataExit;
  }
  return 0;
}
