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

#include <Eigen/Dense>
#include <cassert>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rcac_autopilot {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using RowVecX = Eigen::RowVectorXd;

// Retrospective-cost gain adaptation driven by recursive least squares.
//
// Per controller step k the wrapper around this state performs, in order:
//   1. consume the new performance variable z_k together with the stored
//      (phi_{k-1}, u_{k-1}) in rls_update,
//   2. form phi_k from data through step k-1 (plus any current feedforward
//      signal),
//   3. emit u_k = phi_k * theta,
//   4. store (phi_k, u_k) for the next step.

struct RcacConfig {
  double p0{0.01};          // P_0 = p0 * I
  VecX sigma;               // per-channel sign, entries in {+1, -1}, length l_u
  VecX theta0;              // initial coefficients, length l_theta
  std::vector<bool> mask;   // coefficients forced to zero, length l_theta

  static RcacConfig make(int l_u, int l_theta, double p0, double sigma_sign) {
    assert(p0 > 0.0);
    assert(sigma_sign == 1.0 || sigma_sign == -1.0);
    RcacConfig c;
    c.p0 = p0;
    c.sigma = VecX::Constant(l_u, sigma_sign);
    c.theta0 = VecX::Zero(l_theta);
    c.mask.assign(static_cast<size_t>(l_theta), false);
    return c;
  }
};

struct RcacState {
  VecX theta;      // l_theta
  MatX P;          // l_theta x l_theta, symmetric positive definite
  MatX phi_prev;   // l_u x l_theta, regressor from step k-1
  VecX u_prev;     // l_u, control from step k-1
  long step_count{0};

  static RcacState init(const RcacConfig& cfg) {
    RcacState s;
    const auto l_theta = cfg.theta0.size();
    const auto l_u = cfg.sigma.size();
    s.theta = cfg.theta0;
    for (Eigen::Index i = 0; i < l_theta; ++i) {
      if (cfg.mask[static_cast<size_t>(i)]) s.theta(i) = 0.0;
    }
    s.P = cfg.p0 * MatX::Identity(l_theta, l_theta);
    s.phi_prev = MatX::Zero(l_u, l_theta);
    s.u_prev = VecX::Zero(l_u);
    return s;
  }
};

// History of one SISO error channel feeding a PID-shaped regressor row.
// gamma accumulates exactly one error sample per controller step.
struct PidChannelBuffer {
  double z_prev{0.0};   // z_{k-1}
  double z_prev2{0.0};  // z_{k-2}
  double gamma{0.0};    // running error sum through k-1

  void push(double z_k) {
    z_prev2 = z_prev;
    z_prev = z_k;
    gamma += z_k;
  }
};

// [z_{k-1}, gamma_{k-1}, z_{k-1} - z_{k-2}] plus the feedforward signal r_k
// when requested.
inline RowVecX build_pid_regressor(const PidChannelBuffer& buf, double r_k, bool include_ff) {
  RowVecX row(include_ff ? 4 : 3);
  row(0) = buf.z_prev;
  row(1) = buf.gamma;
  row(2) = buf.z_prev - buf.z_prev2;
  if (include_ff) row(3) = r_k;
  return row;
}

inline VecX control_output(const MatX& phi, const VecX& theta) {
  assert(phi.cols() == theta.size());
  return phi * theta;
}

// Retrospective performance variable zhat(theta) = z_k + sigma (phi_{k-1}
// theta - u_{k-1}) for a single channel.
inline double retrospective_error(double z_k, const RowVecX& phi_prev, const VecX& theta,
                                  double u_prev, double sigma) {
  assert(sigma == 1.0 || sigma == -1.0);
  return z_k + sigma * (phi_prev.dot(theta) - u_prev);
}

// One RLS step: minimizes the accumulated retrospective cost
//   J_k(theta) = sum_i |zhat_i(theta)|^2 + (theta - theta0)^T P0^{-1} (theta - theta0)
// exactly, consuming z_k with the stored (phi_{k-1}, u_{k-1}). With phi = 0
// (no excitation yet) the state is unchanged. Masked coefficients are
// re-zeroed after the update. Covariance loss of positive definiteness is a
// fatal diagnostic in debug builds.
inline void rls_update(RcacState& state, const VecX& z, const RcacConfig& cfg) {
  const MatX& phi = state.phi_prev;
  assert(z.size() == phi.rows());
  assert(cfg.sigma.size() == phi.rows());

  const auto l_u = phi.rows();
  const MatX S = MatX::Identity(l_u, l_u) + phi * state.P * phi.transpose();
  // P_{k+1} = P_k - P_k phi^T S^{-1} phi P_k, symmetrized
  const MatX phiP = phi * state.P;
  MatX Pn = state.P - phiP.transpose() * S.llt().solve(phiP);
  Pn = 0.5 * (Pn + Pn.transpose());

  // theta_{k+1} = theta_k + P_{k+1} phi^T (u_{k-1} - sigma.*z - phi theta_k),
  // the exact minimizer of J_k.
  const VecX resid = state.u_prev - cfg.sigma.cwiseProduct(z) - phi * state.theta;
  state.theta += Pn * (phi.transpose() * resid);
  state.P = Pn;
  for (Eigen::Index i = 0; i < state.theta.size(); ++i) {
    if (cfg.mask[static_cast<size_t>(i)]) state.theta(i) = 0.0;
  }
  ++state.step_count;

#ifndef NDEBUG
  {
    const Eigen::SelfAdjointEigenSolver<MatX> es(state.P);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      std::ostringstream msg;
      msg << "rls_update: covariance lost positive definiteness (min eigenvalue "
          << es.eigenvalues().minCoeff() << " at step " << state.step_count << ")";
      throw std::runtime_error(msg.str());
    }
  }
#endif
}

// One recorded step of an adaptation history: the performance variable z_k
// paired with the regressor and control from the previous step.
struct RcacSample {
  VecX z;
  MatX phi_prev;
  VecX u_prev;
};

// Retrospective cost J(theta) evaluated directly from a history. Test oracle
// for the recursion; intentionally independent of rls_update.
inline double batch_cost(const VecX& theta, const std::vector<RcacSample>& history,
                         const RcacConfig& cfg) {
  assert(!history.empty());
  double cost = 0.0;
  for (const RcacSample& s : history) {
    const VecX zhat = s.z + cfg.sigma.cwiseProduct(s.phi_prev * theta - s.u_prev);
    cost += zhat.squaredNorm();
  }
  const VecX d = theta - cfg.theta0;
  cost += d.squaredNorm() / cfg.p0;
  return cost;
}

}  // namespace rcac_autopilot
