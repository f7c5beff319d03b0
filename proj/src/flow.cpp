// Copyright 2026 The uebcbf Authors
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
#include "uebcbf/flow.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "uebcbf/errors.hpp"

namespace uebcbf {

FlowGrid::FlowGrid(double horizon, double step)
    : horizon_(horizon), step_(step), intervals_(0) {
  if (!(horizon > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("FlowGrid: horizon and step must be > 0");
  }
  const double ratio = horizon / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9) {
    throw std::invalid_argument("FlowGrid: horizon / step must be an integer");
  }
  intervals_ = static_cast<int>(rounded);
}

double FlowGrid::tau(int k) const {
  if (k == intervals_) return horizon_;
  return step_ * k;
}

std::vector<double> FlowGrid::taus() const {
  std::vector<double> out(count());
  for (int k = 0; k < count(); ++k) out[k] = tau(k);
  return out;
}

namespace {

void check_escape(const Box& escape_box, const Vec& phi, double tau) {
  if (!phi.allFinite() || !escape_box.contains(phi)) {
    std::ostringstream os;
    os << "backup flow left the inflated state domain at tau=" << tau
       << ": [" << phi.transpose() << "]";
    throw FlowEscapeError(os.str());
  }
}

template <typename Rhs>
Vec rk4_step(const Rhs& rhs, double tau, const Vec& y, double h) {
  const Vec k1 = rhs(tau, y);
  const Vec k2 = rhs(tau + 0.5 * h, y + 0.5 * h * k1);
  const Vec k3 = rhs(tau + 0.5 * h, y + 0.5 * h * k2);
  const Vec k4 = rhs(tau + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

FlowBundle integrate_flow_bundle(const SystemModel& model,
                                 const BackupPolicy& policy, const Vec& x,
                                 const Vec& d_hat, const FlowGrid& grid,
                                 int substeps) {
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (!model.state_domain.contains(x)) {
    throw DomainError("integrate_flow_bundle: initial state outside domain");
  }
  const int n = model.n;
  const int dim = bundle_ode_dimension(n);
  const Box escape_box = model.state_domain.inflated(1.5);

  // Layout: [phi (n) | Phi column-major (n*n) | Theta column-major (n*n)].
  auto rhs = [&](double, const Vec& y) {
    Vec dy(dim);
    const Vec phi = y.head(n);
    const Mat jac = closed_loop_jacobian(model, policy, phi);
    dy.head(n) = closed_loop_field(model, policy, phi) + d_hat;
    Eigen::Map<const Mat> sens_x(y.data() + n, n, n);
    Eigen::Map<const Mat> sens_d(y.data() + n + n * n, n, n);
    Eigen::Map<Mat>(dy.data() + n, n, n) = jac * sens_x;
    Eigen::Map<Mat>(dy.data() + n + n * n, n, n) =
        jac * sens_d + Mat::Identity(n, n);
    return dy;
  };

  Vec y = Vec::Zero(dim);
  y.head(n) = x;
  Eigen::Map<Mat>(y.data() + n, n, n) = Mat::Identity(n, n);

  FlowBundle out;
  out.d_hat = d_hat;
  out.phi.reserve(grid.count());
  out.Phi.reserve(grid.count());
  out.Theta.reserve(grid.count());
  auto record = [&](const Vec& s) {
    out.phi.push_back(s.head(n));
    out.Phi.push_back(Eigen::Map<const Mat>(s.data() + n, n, n));
    out.Theta.push_back(Eigen::Map<const Mat>(s.data() + n + n * n, n, n));
  };
  // The tau = 0 node is recorded from the initial condition exactly.
  record(y);
  const double h = grid.step() / substeps;
  for (int k = 0; k < grid.intervals(); ++k) {
    for (int s = 0; s < substeps; ++s) {
      const double tau = grid.tau(k) + s * h;
      y = rk4_step(rhs, tau, y, h);
      check_escape(escape_box, y.head(n), tau + h);
    }
    record(y);
  }
  return out;
}

NominalFlow integrate_nominal_flow(const SystemModel& model,
                                   const BackupPolicy& policy, const Vec& x,
                                   const FlowGrid& grid, int substeps) {
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (!model.state_domain.contains(x)) {
    throw DomainError("integrate_nominal_flow: initial state outside domain");
  }
  const int n = model.n;
  const int dim = n + n * n;
  const Box escape_box = model.state_domain.inflated(1.5);

  auto rhs = [&](double, const Vec& y) {
    Vec dy(dim);
    const Vec phi = y.head(n);
    dy.head(n) = closed_loop_field(model, policy, phi);
    Eigen::Map<Mat>(dy.data() + n, n, n) =
        closed_loop_jacobian(model, policy, phi) *
        Eigen::Map<const Mat>(y.data() + n, n, n);
    return dy;
  };

  Vec y = Vec::Zero(dim);
  y.head(n) = x;
  Eigen::Map<Mat>(y.data() + n, n, n) = Mat::Identity(n, n);

  NominalFlow out;
  auto record = [&](const Vec& s) {
    out.phi.push_back(s.head(n));
    out.Phi.push_back(Eigen::Map<const Mat>(s.data() + n, n, n));
  };
  record(y);
  const double h = grid.step() / substeps;
  for (int k = 0; k < grid.intervals(); ++k) {
    for (int s = 0; s < substeps; ++s) {
      const double tau = grid.tau(k) + s * h;
      y = rk4_step(rhs, tau, y, h);
      check_escape(escape_box, y.head(n), tau + h);
    }
    record(y);
  }
  return out;
}

std::vector<Vec> integrate_state_flow(const SystemModel& model,
                                      const BackupPolicy& policy, const Vec& x,
                                      const Forcing& forcing,
                                      const FlowGrid& grid, int substeps) {
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const Box escape_box = model.state_domain.inflated(1.5);
  auto rhs = [&](double tau, const Vec& y) {
    return Vec(closed_loop_field(model, policy, y) + forcing(tau));
  };
  std::vector<Vec> out;
  out.reserve(grid.count());
  Vec y = x;
  out.push_back(y);
  const double h = grid.step() / substeps;
  for (int k = 0; k < grid.intervals(); ++k) {
    for (int s = 0; s < substeps; ++s) {
      const double tau = grid.tau(k) + s * h;
      y = rk4_step(rhs, tau, y, h);
      check_escape(escape_box, y, tau + h);
    }
    out.push_back(y);
  }
  return out;
}

SensitivityEstimate finite_difference_flow_sensitivity(
    const SystemModel& model, const BackupPolicy& policy, const Vec& x,
    const Vec& d_hat, const FlowGrid& grid, int substeps, double bump) {
  if (!(bump > 0.0)) throw std::invalid_argument("bump must be > 0");
  const int n = model.n;
  auto terminal = [&](const Vec& x0, const Vec& dh) {
    const Forcing constant = [&dh](double) { return dh; };
    return integrate_state_flow(model, policy, x0, constant, grid, substeps)
        .back();
  };
  SensitivityEstimate out{Mat(n, n), Mat(n, n)};
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += bump;
    xm[j] -= bump;
    out.Phi.col(j) = (terminal(xp, d_hat) - terminal(xm, d_hat)) / (2 * bump);
    Vec dp = d_hat, dm = d_hat;
    dp[j] += bump;
    dm[j] -= bump;
    out.Theta.col(j) = (terminal(x, dp) - terminal(x, dm)) / (2 * bump);
  }
  return out;
}

}  // namespace uebcbf
