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

// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcac_autopilot/cli.hpp"
#include "rcac_autopilot/simulation.hpp"

namespace ra = rcac_autopilot;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

void report(int index, const char* name, bool pass, const std::string& detail,
            double elapsed_s) {
  std::printf("criterion %2d [%s] %s: %s (%.2f s)\n", index, pass ? "PASS" : "FAIL", name,
              detail.c_str(), elapsed_s);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// criteria 1 & 2: recursion vs batch minimizer, covariance properties

ra::VecX batch_minimizer(const std::vector<ra::RcacSample>& hist, const ra::RcacConfig& cfg) {
  const auto n = cfg.theta0.size();
  ra::MatX m = ra::MatX::Identity(n, n) / cfg.p0;
  ra::VecX b = cfg.theta0 / cfg.p0;
  for (const ra::RcacSample& s : hist) {
    m += s.phi_prev.transpose() * s.phi_prev;
    b += s.phi_prev.transpose() * (s.u_prev - cfg.sigma.cwiseProduct(s.z));
  }
  return m.ldlt().solve(b);
}

struct RlsCheckResult {
  double max_rel_err = 0.0;
  double max_asym = 0.0;
  double min_monotone_eig = 0.0;
  int histories = 0;
};

RlsCheckResult run_rls_batch_check() {
  RlsCheckResult out;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  struct Shape {
    int l_u;
    int l_theta;
  };
  const Shape shapes[] = {{1, 1}, {1, 3}, {1, 4}, {3, 9}, {3, 12}};
  for (const Shape& shape : shapes) {
    for (int h = 0; h < 20; ++h) {
      const double sigma = (h % 2 == 0) ? -1.0 : 1.0;
      const double p0 = (h % 3 == 0) ? 0.01 : 0.001;
      const ra::RcacConfig cfg = ra::RcacConfig::make(shape.l_u, shape.l_theta, p0, sigma);
      ra::RcacState st = ra::RcacState::init(cfg);
      std::vector<ra::RcacSample> hist;
      for (int k = 0; k < 50; ++k) {
        ra::RcacSample s;
        s.z = ra::VecX::NullaryExpr(shape.l_u, [&] { return u(rng); });
        s.phi_prev =
            ra::MatX::NullaryExpr(shape.l_u, shape.l_theta, [&] { return u(rng); });
        s.u_prev = ra::VecX::NullaryExpr(shape.l_u, [&] { return u(rng); });
        hist.push_back(s);
        const ra::MatX p_before = st.P;
        st.phi_prev = s.phi_prev;
        st.u_prev = s.u_prev;
        ra::rls_update(st, s.z, cfg);
        const ra::VecX expected = batch_minimizer(hist, cfg);
        const double rel =
            (st.theta - expected).norm() / std::max(1e-12, expected.norm());
        out.max_rel_err = std::max(out.max_rel_err, rel);
        out.max_asym =
            std::max(out.max_asym, (st.P - st.P.transpose()).cwiseAbs().maxCoeff());
        const Eigen::SelfAdjointEigenSolver<ra::MatX> es(p_before - st.P);
        out.min_monotone_eig = std::min(out.min_monotone_eig, es.eigenvalues().minCoeff());
      }
      ++out.histories;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// criterion 3: dynamics oracles

struct DynamicsCheck {
  double ballistic_err = 0.0;
  double hover_drift = 0.0;
  double momentum_drift = 0.0;
  double rk4_ratio = 0.0;
};

DynamicsCheck run_dynamics_check() {
  DynamicsCheck out;
  {
    ra::VehicleParams p;
    ra::RigidBodyState s;
    for (int k = 0; k < 500; ++k) s = ra::step(s, ra::ActuatorCommand{}, 0.002, p);
    out.ballistic_err = std::abs(s.r.z() - 0.5 * p.g) + s.r.head<2>().norm();
  }
  {
    ra::VehicleParams p;
    ra::RigidBodyState s;
    const ra::ActuatorCommand cmd{p.m * p.g, ra::Vec3::Zero()};
    for (int k = 0; k < 5000; ++k) s = ra::step(s, cmd, 0.002, p);
    out.hover_drift = s.r.norm();
  }
  {
    ra::VehicleParams p;
    p.J = ra::Vec3(1.0, 2.0, 3.0).asDiagonal();
    ra::RigidBodyState s;
    s.omega = ra::Vec3(0.3, 0.5, 0.7);
    const double h0 = (p.J * s.omega).norm();
    for (int k = 0; k < 5000; ++k) s = ra::step(s, ra::ActuatorCommand{}, 0.002, p);
    out.momentum_drift = std::abs((p.J * s.omega).norm() / h0 - 1.0);
  }
  {
    ra::VehicleParams p;
    ra::RigidBodyState s0;
    s0.v = ra::Vec3(1.0, -0.5, 0.2);
    s0.q = ra::euler_to_quat({0.3, 0.2, -0.1});
    s0.omega = ra::Vec3(6.0, -4.0, 8.0);
    const ra::ActuatorCommand cmd{0.8 * p.m * p.g, ra::Vec3(0.1, -0.08, 0.05)};
    auto integrate = [&](double dt, int n) {
      ra::RigidBodyState s = s0;
      for (int k = 0; k < n; ++k) s = ra::step(s, cmd, dt, p);
      return s;
    };
    auto dist = [](const ra::RigidBodyState& a, const ra::RigidBodyState& b) {
      return (a.r - b.r).norm() + (a.v - b.v).norm() + (a.omega - b.omega).norm();
    };
    const ra::RigidBodyState ref = integrate(0.000125, 8000);
    const double ec = dist(integrate(0.002, 500), ref);
    const double ef = dist(integrate(0.001, 1000), ref);
    out.rk4_ratio = ec / ef;
  }
  return out;
}

// ---------------------------------------------------------------------------
// criterion 4: f2q alignment

struct F2qCheck {
  double max_axis_err = 0.0;
  double max_psi_err = 0.0;
};

F2qCheck run_f2q_check() {
  F2qCheck out;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> lat(-15.0, 15.0);
  std::uniform_real_distribution<double> vert(-30.0, -2.0);
  std::uniform_real_distribution<double> azi(-ra::kPi, ra::kPi);
  for (int i = 0; i < 1000; ++i) {
    const ra::Vec3 f(lat(rng), lat(rng), vert(rng));
    const double psi = azi(rng);
    const ra::UnitQuaternion q = ra::f2q(f, psi);
    const ra::Vec3 k_body = ra::rotate(q, ra::Vec3::UnitZ());
    out.max_axis_err = std::max(out.max_axis_err, (k_body + f.normalized()).norm());
    out.max_psi_err = std::max(
        out.max_psi_err, std::abs(ra::wrap_angle(ra::euler_from_quat(q).psi - psi)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// mission experiments shared by criteria 5-9

std::string serialize_log(const ra::SimulationLog& log) {
  std::string out;
  for (const ra::LogRecord& rec : log) {
    out += ra::log_record_to_csv(rec);
    out += '\n';
  }
  return out;
}

ra::ExperimentResult run_mission(double alpha, bool adaptive,
                                 ra::AdaptiveLoopsEnabled loops = ra::AdaptiveLoopsEnabled::all()) {
  ra::ExperimentConfig cfg;
  cfg.alpha_p = alpha;
  cfg.adaptive = adaptive;
  cfg.loops = loops;
  return ra::run_experiment(cfg, ra::default_mission());
}

}  // namespace

int main() {
  std::printf("acceptance suite (version %s)\n", ra::kVersion);

  // --- criteria 1 and 2 ----------------------------------------------------
  double t0 = now_seconds();
  const RlsCheckResult rls = run_rls_batch_check();
  const double t_rls = now_seconds() - t0;
  report(1, "rls recursion equals batch minimizer", rls.max_rel_err < 1e-8 && t_rls < 10.0,
         std::to_string(rls.histories) + " histories, max rel err " + fmt(rls.max_rel_err),
         t_rls);
  report(2, "covariance symmetric and monotone",
         rls.max_asym < 1e-12 && rls.min_monotone_eig > -1e-12,
         "max asymmetry " + fmt(rls.max_asym) + ", min monotonicity eigenvalue " +
             fmt(rls.min_monotone_eig),
         t_rls);

  // --- criterion 3 ----------------------------------------------------------
  t0 = now_seconds();
  const DynamicsCheck dyn = run_dynamics_check();
  const double t_dyn = now_seconds() - t0;
  report(3, "dynamics oracle suite",
         dyn.ballistic_err < 1e-9 && dyn.hover_drift < 1e-6 && dyn.momentum_drift < 1e-6 &&
             dyn.rk4_ratio >= 12.0 && t_dyn < 5.0,
         "ballistic " + fmt(dyn.ballistic_err) + " m, hover " + fmt(dyn.hover_drift) +
             " m, momentum " + fmt(dyn.momentum_drift) + ", rk4 ratio " +
             fmt(dyn.rk4_ratio),
         t_dyn);

  // --- criterion 4 ----------------------------------------------------------
  t0 = now_seconds();
  const F2qCheck f2q = run_f2q_check();
  report(4, "f2q alignment", f2q.max_axis_err < 1e-9 && f2q.max_psi_err < 1e-9,
         "max axis err " + fmt(f2q.max_axis_err) + ", max azimuth err " +
             fmt(f2q.max_psi_err),
         now_seconds() - t0);

  // --- criterion 5: transparency --------------------------------------------
  t0 = now_seconds();
  const ra::ExperimentResult stock_1 = run_mission(1.0, false);
  const ra::ExperimentResult disabled_1 =
      run_mission(1.0, true, ra::AdaptiveLoopsEnabled::none());
  const bool transparent =
      serialize_log(stock_1.log) == serialize_log(disabled_1.log) &&
      stock_1.metrics.completed;
  report(5, "adaptive-with-loops-disabled is bit-identical to stock", transparent,
         std::to_string(stock_1.log.size()) + " samples compared", now_seconds() - t0);

  // --- criterion 6: degradation ----------------------------------------------
  t0 = now_seconds();
  const ra::ExperimentResult stock_03 = run_mission(0.3, false);
  const double t_run_03 = now_seconds() - t0;
  const double rmse_ratio =
      stock_03.metrics.position_rmse / stock_1.metrics.position_rmse;
  const bool degraded =
      (!stock_03.metrics.completed || rmse_ratio >= 2.0) && t_run_03 < 30.0;
  report(6, "detuned stock autopilot degrades", degraded,
         "rmse ratio " + fmt(rmse_ratio) +
             (stock_03.metrics.completed ? " (completed)" : " (did not complete)"),
         t_run_03);

  // --- criterion 7: recovery --------------------------------------------------
  t0 = now_seconds();
  const ra::ExperimentResult adaptive_03 = run_mission(0.3, true);
  bool recovered = adaptive_03.metrics.completed && stock_1.metrics.completed;
  std::string detail;
  if (recovered) {
    const double time_ratio =
        adaptive_03.metrics.completion_time / stock_1.metrics.completion_time;
    const double rmse_ratio_a =
        adaptive_03.metrics.position_rmse / stock_1.metrics.position_rmse;
    recovered = time_ratio <= 1.25 && rmse_ratio_a <= 1.5;
    if (stock_03.metrics.completed) {
      recovered = recovered && adaptive_03.metrics.completion_time <
                                   stock_03.metrics.completion_time;
    }
    detail = "time ratio " + fmt(time_ratio) + ", rmse ratio " + fmt(rmse_ratio_a);
  } else {
    detail = "detuned adaptive mission did not complete";
  }
  report(7, "adaptive autopilot recovers detuned performance", recovered, detail,
         now_seconds() - t0);

  // --- criterion 8: non-interference ------------------------------------------
  t0 = now_seconds();
  const ra::ExperimentResult adaptive_1 = run_mission(1.0, true);
  const double noninterference_ratio =
      adaptive_1.metrics.position_rmse / stock_1.metrics.position_rmse;
  report(8, "adaptive augmentation does not hurt the tuned autopilot",
         adaptive_1.metrics.completed && noninterference_ratio <= 1.10,
         "rmse ratio " + fmt(noninterference_ratio), now_seconds() - t0);

  // --- criterion 9: gain magnitude trend ---------------------------------------
  t0 = now_seconds();
  const bool gain_trend =
      adaptive_03.metrics.terminal_theta_omega_norm >
          adaptive_1.metrics.terminal_theta_omega_norm &&
      adaptive_03.metrics.terminal_theta_v_norm > adaptive_1.metrics.terminal_theta_v_norm;
  report(9, "adaptive gain magnitudes grow as alpha_p shrinks", gain_trend,
         "|theta_omega| " + fmt(adaptive_1.metrics.terminal_theta_omega_norm) + " -> " +
             fmt(adaptive_03.metrics.terminal_theta_omega_norm) + ", |theta_v| " +
             fmt(adaptive_1.metrics.terminal_theta_v_norm) + " -> " +
             fmt(adaptive_03.metrics.terminal_theta_v_norm),
         now_seconds() - t0);

  // --- criterion 10: determinism and replay ------------------------------------
  t0 = now_seconds();
  bool deterministic = true;
  std::string det_detail = "grid repeated and replayed bit-identically";
  const fs::path base =
      fs::temp_directory_path() / ("rcac_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  try {
    ra::cli::CommonOptions grid_opt;
    grid_opt.mission = "default";
    grid_opt.duration = 180.0;
    grid_opt.seed = 7;

    grid_opt.out = (base / "grid_a").string();
    if (ra::cli::cmd_grid(grid_opt) != 0) throw std::runtime_error("grid a failed");
    grid_opt.out = (base / "grid_b").string();
    if (ra::cli::cmd_grid(grid_opt) != 0) throw std::runtime_error("grid b failed");

    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      if (!in) throw std::runtime_error("missing " + p.string());
      return std::string((std::istreambuf_iterator<char>(in)), {});
    };
    for (const char* f : {"summary.csv", "summary_long.csv"}) {
      if (slurp(base / "grid_a" / f) != slurp(base / "grid_b" / f)) {
        deterministic = false;
        det_detail = std::string("mismatch in ") + f;
      }
    }
    for (const char* run : {"stock_alpha1", "stock_alpha0.5", "stock_alpha0.3",
                            "adaptive_alpha1", "adaptive_alpha0.5", "adaptive_alpha0.3"}) {
      for (const char* f : {"log.csv", "gains.csv", "metrics.txt"}) {
        if (slurp(base / "grid_a" / run / f) != slurp(base / "grid_b" / run / f)) {
          deterministic = false;
          det_detail = std::string("mismatch in ") + run + "/" + f;
        }
      }
      // replay must reproduce the stored metrics exactly
      const ra::SimulationLog log = ra::read_log_csv((base / "grid_a" / run / "log.csv").string());
      ra::MetricsReport rep = ra::compute_metrics(log, ra::default_mission());
      ra::attach_gain_norms(rep,
                            ra::read_gains_csv((base / "grid_a" / run / "gains.csv").string()));
      if (ra::metrics_to_text(rep) != slurp(base / "grid_a" / run / "metrics.txt")) {
        deterministic = false;
        det_detail = std::string("replay mismatch for ") + run;
      }
    }
  } catch (const std::exception& e) {
    deterministic = false;
    det_detail = e.what();
  }
  fs::remove_all(base);
  report(10, "grid determinism and exact metrics replay", deterministic, det_detail,
         now_seconds() - t0);

  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
