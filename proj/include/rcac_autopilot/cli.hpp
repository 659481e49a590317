// Copyright 2026 The rcac-autopilot Authors
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

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcac_autopilot/config_io.hpp"
#include "rcac_autopilot/simulation.hpp"
#include "rcac_autopilot/version.hpp"

namespace rcac_autopilot::cli {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitAborted = 3;
constexpr int kExitBadInput = 4;

struct CommonOptions {
  double alpha{1.0};
  bool stock{false};
  bool adaptive{false};
  std::string mission{"default"};
  std::string gains_path;
  std::string hyper_path;
  std::string loops{"r,v,q,omega"};
  bool unmask_ff{false};
  double dt{0.002};
  double duration{180.0};
  std::uint64_t seed{0};
  std::string out;
};

inline std::string default_out_dir() {
  if (const char* env = std::getenv("RCAC_AUTOPILOT_OUT")) return env;
  return "out";
}

inline AdaptiveLoopsEnabled parse_loops(const std::string& spec) {
  AdaptiveLoopsEnabled en;
  std::istringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "r") en.r = true;
    else if (tok == "v") en.v = true;
    else if (tok == "q") en.q = true;
    else if (tok == "omega") en.omega = true;
    else if (!tok.empty()) throw ConfigError("unknown loop `" + tok + "` (expected r,v,q,omega)");
  }
  return en;
}

inline MissionPlan resolve_mission(const std::string& spec) {
  if (spec == "default") return default_mission();
  return load_mission(spec);
}

inline ExperimentConfig build_config(const CommonOptions& opt) {
  ExperimentConfig cfg;
  cfg.alpha_p = opt.alpha;
  cfg.adaptive = opt.adaptive;
  cfg.loops = parse_loops(opt.loops);
  cfg.mask_rate_ff = !opt.unmask_ff;
  cfg.dt = opt.dt;
  cfg.duration_cap = opt.duration;
  cfg.seed = opt.seed;
  if (!opt.gains_path.empty()) cfg.gains = load_gains(opt.gains_path);
  if (!opt.hyper_path.empty()) cfg.hyper = load_hyper(opt.hyper_path);
  return cfg;
}

struct RunArtifacts {
  fs::path log_csv;
  fs::path gains_csv;
  fs::path metrics_txt;
  fs::path manifest_json;
};

// Executes one experiment and writes log.csv, gains.csv, metrics.txt and
// manifest.json into dir.
inline RunArtifacts write_run(const ExperimentConfig& cfg, const MissionPlan& plan,
                              const std::string& experiment_id, const fs::path& dir,
                              ExperimentResult* result_out = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res = run_experiment(cfg, plan);
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(dir);
  RunArtifacts art{dir / "log.csv", dir / "gains.csv", dir / "metrics.txt",
                   dir / "manifest.json"};
  write_log_csv(art.log_csv.string(), res.log);
  write_gains_csv(art.gains_csv.string(), res.gain_log);
  {
    std::ofstream m(art.metrics_txt, std::ios::binary);
    m << metrics_to_text(res.metrics);
  }
  {
    nlohmann::json manifest;
    manifest["experiment_id"] = experiment_id;
    manifest["version"] = kVersion;
    manifest["wall_clock_runtime_s"] = wall_s;
    manifest["config"] = {
        {"alpha_p", cfg.alpha_p},
        {"adaptive", cfg.adaptive},
        {"loops", {{"r", cfg.loops.r}, {"v", cfg.loops.v}, {"q", cfg.loops.q},
                   {"omega", cfg.loops.omega}}},
        {"mask_rate_ff", cfg.mask_rate_ff},
        {"dt", cfg.dt},
        {"duration_cap", cfg.duration_cap},
        {"seed", cfg.seed},
        {"p0", {{"r", cfg.hyper.p0_r}, {"v", cfg.hyper.p0_v}, {"q", cfg.hyper.p0_q},
                {"omega", cfg.hyper.p0_omega}}},
    };
    manifest["outputs"] = {art.log_csv.filename().string(), art.gains_csv.filename().string(),
                           art.metrics_txt.filename().string()};
    manifest["aborted"] = res.aborted;
    if (res.aborted) manifest["abort_reason"] = res.abort_reason;
    std::ofstream m(art.manifest_json, std::ios::binary);
    m << manifest.dump(2) << '\n';
  }
  if (result_out) *result_out = std::move(res);
  return art;
}

inline int cmd_run(const CommonOptions& opt) {
  const MissionPlan plan = resolve_mission(opt.mission);
  const ExperimentConfig cfg = build_config(opt);
  const std::string id = std::string(opt.adaptive ? "adaptive" : "stock") + "_alpha" +
                         format_double(opt.alpha);
  ExperimentResult res;
  write_run(cfg, plan, id, fs::path(opt.out), &res);
  if (res.aborted) {
    std::cerr << "simulation aborted: " << res.abort_reason << '\n';
    return kExitAborted;
  }
  std::cout << metrics_to_text(res.metrics);
  return kExitOk;
}

struct GridRow {
  double alpha{0.0};
  bool adaptive{false};
  MetricsReport metrics;
  bool aborted{false};
};

inline int cmd_grid(const CommonOptions& opt) {
  const MissionPlan plan = resolve_mission(opt.mission);
  const std::vector<double> alphas{1.0, 0.5, 0.3};
  struct Job {
    double alpha;
    bool adaptive;
  };
  std::vector<Job> jobs;
  for (double a : alphas) {
    jobs.push_back({a, false});
    jobs.push_back({a, true});
  }
  std::vector<GridRow> rows(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      CommonOptions run_opt = opt;
      run_opt.alpha = jobs[i].alpha;
      run_opt.adaptive = jobs[i].adaptive;
      run_opt.stock = !jobs[i].adaptive;
      const ExperimentConfig cfg = build_config(run_opt);
      const std::string id = std::string(jobs[i].adaptive ? "adaptive" : "stock") +
                             "_alpha" + format_double(jobs[i].alpha);
      ExperimentResult res;
      write_run(cfg, plan, id, fs::path(opt.out) / id, &res);
      rows[i] = GridRow{jobs[i].alpha, jobs[i].adaptive, res.metrics, res.aborted};
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(
      std::thread::hardware_concurrency(), static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  fs::create_directories(opt.out);
  {
    std::ofstream s(fs::path(opt.out) / "summary.csv", std::ios::binary);
    s << "alpha,mode,rmse,completion_time,completed\n";
    for (const GridRow& row : rows) {
      s << format_double(row.alpha) << ',' << (row.adaptive ? "adaptive" : "stock") << ','
        << format_double(row.metrics.position_rmse) << ','
        << format_double(row.metrics.completion_time) << ','
        << (row.metrics.completed ? "true" : "false") << '\n';
    }
  }
  {
    // long format for external plotting tools
    std::ofstream s(fs::path(opt.out) / "summary_long.csv", std::ios::binary);
    s << "alpha,mode,metric,value\n";
    for (const GridRow& row : rows) {
      const std::string prefix = format_double(row.alpha) + "," +
                                 (row.adaptive ? "adaptive" : "stock") + ",";
      s << prefix << "position_rmse," << format_double(row.metrics.position_rmse) << '\n';
      s << prefix << "azimuth_rmse," << format_double(row.metrics.azimuth_rmse) << '\n';
      s << prefix << "completion_time," << format_double(row.metrics.completion_time) << '\n';
      s << prefix << "max_overshoot," << format_double(row.metrics.max_overshoot) << '\n';
      s << prefix << "completed," << (row.metrics.completed ? "1" : "0") << '\n';
      s << prefix << "terminal_theta_v_norm,"
        << format_double(row.metrics.terminal_theta_v_norm) << '\n';
      s << prefix << "terminal_theta_omega_norm,"
        << format_double(row.metrics.terminal_theta_omega_norm) << '\n';
    }
  }
  bool any_aborted = false;
  for (const GridRow& row : rows) any_aborted = any_aborted || row.aborted;
  if (any_aborted) {
    std::cerr << "one or more grid runs aborted\n";
    return kExitAborted;
  }
  return kExitOk;
}

struct ReplayOptions {
  std::string log_path;
  std::string mission{"default"};
};

// Recomputes the metrics report from a written log. Reads the sibling
// gains.csv for the terminal coefficient norms when present.
inline int cmd_replay_metrics(const ReplayOptions& opt) {
  const MissionPlan plan = resolve_mission(opt.mission);
  const SimulationLog log = read_log_csv(opt.log_path);
  if (log.empty()) {
    std::cerr << opt.log_path << ": log has no samples\n";
    return kExitBadInput;
  }
  MetricsReport rep = compute_metrics(log, plan);
  const fs::path gains_path = fs::path(opt.log_path).parent_path() / "gains.csv";
  if (fs::exists(gains_path)) {
    attach_gain_norms(rep, read_gains_csv(gains_path.string()));
  } else {
    std::cerr << "note: " << gains_path.string()
              << " not found; terminal coefficient norms reported as zero\n";
  }
  std::cout << metrics_to_text(rep);
  return kExitOk;
}

// Parses argv (without the program name) and dispatches. Returns the process
// exit code instead of exiting so tests can drive it in-process.
inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"quadcopter autopilot workbench: cascaded control with "
               "retrospective-cost gain adaptation"};
  app.require_subcommand(1);

  CommonOptions opt;
  opt.out = default_out_dir();
  ReplayOptions replay_opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--alpha", opt.alpha, "detuning factor applied to all 27 gains")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--stock", opt.stock, "fixed-gain autopilot");
    cmd->add_flag("--adaptive", opt.adaptive, "adaptive autopilot");
    cmd->add_option("--mission", opt.mission, "mission file path or `default`");
    cmd->add_option("--gains", opt.gains_path, "gain configuration file");
    cmd->add_option("--hyper", opt.hyper_path, "adaptation hyperparameter file");
    cmd->add_option("--loops", opt.loops, "comma-separated adaptive loop subset");
    cmd->add_flag("--unmask-ff", opt.unmask_ff,
                  "lift the axis-1 rate-feedforward coefficient mask");
    cmd->add_option("--dt", opt.dt, "physics step (s)")->check(CLI::PositiveNumber);
    cmd->add_option("--duration", opt.duration, "duration cap (s)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "rng seed for initial-state jitter");
    cmd->add_option("--out", opt.out, "output directory (default $RCAC_AUTOPILOT_OUT)");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run);
  CLI::App* grid = app.add_subcommand(
      "grid", "run the {1.0, 0.5, 0.3} x {stock, adaptive} comparison grid");
  add_common(grid);
  CLI::App* replay = app.add_subcommand("replay-metrics",
                                        "recompute metrics from an existing log.csv");
  replay->add_option("log", replay_opt.log_path, "path to log.csv")->required();
  replay->add_option("--mission", replay_opt.mission, "mission file path or `default`");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      if (opt.stock == opt.adaptive) {
        std::cerr << "exactly one of --stock or --adaptive is required\n";
        return kExitBadInput;
      }
      return cmd_run(opt);
    }
    if (grid->parsed()) {
      if (opt.stock || opt.adaptive) {
        std::cerr << "grid runs both modes; --stock/--adaptive are not accepted\n";
        return kExitBadInput;
      }
      return cmd_grid(opt);
    }
    if (replay->parsed()) {
      return cmd_replay_metrics(replay_opt);
    }
  } catch (const CsvError& e) {
    std::cerr << e.what() << '\n';
    return kExitBadInput;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitBadInput;
  } catch (const MissionFileError& e) {
    std::cerr << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitAborted;
  }
  return kExitOk;
}

}  // namespace rcac_autopilot::cli
