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
#ifndef UEBCBF_FLOW_HPP_
#define UEBCBF_FLOW_HPP_

#include <functional>
#include <vector>

#include "uebcbf/linalg.hpp"
#include "uebcbf/systems.hpp"

namespace uebcbf {

// Uniform backup-time grid {0, step, ..., horizon}.
class FlowGrid {
 public:
  // Throws std::invalid_argument unless horizon / step is an integer
  // (within 1e-9) and both are positive.
  FlowGrid(double horizon, double step);

  double horizon() const { return horizon_; }
  double step() const { return step_; }
  int intervals() const { return intervals_; }
  int count() const { return intervals_ + 1; }
  double tau(int k) const;
  std::vector<double> taus() const;

 private:
  double horizon_;
  double step_;
  int intervals_;
};

// Estimated backup flow with sensitivities w.r.t. x (Phi) and d_hat (Theta),
// one entry per grid node.
struct FlowBundle {
  std::vector<Vec> phi;
  std::vector<Mat> Phi;
  std::vector<Mat> Theta;
  Vec d_hat;

  int nodes() const { return static_cast<int>(phi.size()); }
};

struct NominalFlow {
  std::vector<Vec> phi;
  std::vector<Mat> Phi;
};

// Number of scalar ODEs integrated for the bundle of an n-state system.
constexpr int bundle_ode_dimension(int n) { return n + 2 * n * n; }

// Jointly integrates
//   phi'   = f_cl(phi) + d_hat
//   Phi'   = J_cl(phi) Phi,          Phi(0)   = I
//   Theta' = J_cl(phi) Theta + I,    Theta(0) = 0
// with fixed-step RK4 of size grid.step() / substeps. Throws FlowEscapeError
// when phi leaves the state domain inflated by 1.5.
FlowBundle integrate_flow_bundle(const SystemModel& model,
                                 const BackupPolicy& policy, const Vec& x,
                                 const Vec& d_hat, const FlowGrid& grid,
                                 int substeps);

// Undisturbed flow and its state-transition matrix.
NominalFlow integrate_nominal_flow(const SystemModel& model,
                                   const BackupPolicy& policy, const Vec& x,
                                   const FlowGrid& grid, int substeps);

// State-only flow phi' = f_cl(phi) + forcing(tau). Used for the disturbed
// flow and as the finite-difference oracle's flow map.
using Forcing = std::function<Vec(double tau)>;
std::vector<Vec> integrate_state_flow(const SystemModel& model,
                                      const BackupPolicy& policy, const Vec& x,
                                      const Forcing& forcing,
                                      const FlowGrid& grid, int substeps);

struct SensitivityEstimate {
  Mat Phi;
  Mat Theta;
};

// Central differences of the tau = T flow w.r.t. x and d_hat.
SensitivityEstimate finite_difference_flow_sensitivity(
    const SystemModel& model, const BackupPolicy& policy, const Vec& x,
    const Vec& d_hat, const FlowGrid& grid, int substeps, double bump = 1e-5);

}  // namespace uebcbf

#endif  // UEBCBF_FLOW_HPP_
