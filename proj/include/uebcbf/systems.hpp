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
#ifndef UEBCBF_SYSTEMS_HPP_
#define UEBCBF_SYSTEMS_HPP_

#include <functional>
#include <string>
#include <vector>

#include "uebcbf/linalg.hpp"

namespace uebcbf {

// Axis-aligned box, used for both the state domain and sampling regions.
struct Box {
  Vec lower;
  Vec upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vec& x) const;
  // Scales the half-widths about the center.
  Box inflated(double factor) const;
  Vec center() const { return 0.5 * (lower + upper); }
};

// Control-affine dynamics x' = f(x) + g(x) u with box input bounds.
//
// Jacobians are supplied analytically: drift_jacobian is df/dx and
// input_jacobian(x, u) is d(g(x) u)/dx for a fixed u.
struct SystemModel {
  int n = 0;
  int m = 0;
  std::function<Vec(const Vec&)> drift;
  std::function<Mat(const Vec&)> input_matrix;
  std::function<Mat(const Vec&)> drift_jacobian;
  std::function<Mat(const Vec&, const Vec&)> input_jacobian;
  Vec input_lower;
  Vec input_upper;
  Box state_domain;

  // Throws std::invalid_argument when the dimensions or bounds are
  // inconsistent.
  void validate() const;
  bool input_admissible(const Vec& u, double tol = 0.0) const;
  Vec clip_input(const Vec& u) const;
};

// Additive disturbance d(t) together with the known bounds
// |d(t)| <= delta_d and |d'(t)| <= delta_v.
struct DisturbanceTruth {
  std::function<Vec(double)> d;
  std::function<Vec(double)> d_dot;
  double delta_d = 0.0;
  double delta_v = 0.0;
};

struct BackupPolicy {
  std::function<Vec(const Vec&)> control;
  std::function<Mat(const Vec&)> jacobian;  // m x n
  bool admissible = true;
};

struct BarrierSpec {
  std::function<double(const Vec&)> h;
  std::function<RowVec(const Vec&)> grad_h;
  std::function<double(const Vec&)> h_b;
  std::function<RowVec(const Vec&)> grad_h_b;
  double lipschitz_h = 1.0;
  double lipschitz_hb = 1.0;
};

// Linear class-K-infinity function alpha(s) = slope * s.
struct ClassKappa {
  double slope = 5.0;

  explicit ClassKappa(double s = 5.0);
  double operator()(double s) const { return slope * s; }
};

using PrimaryController = std::function<Vec(const Vec&)>;

// f(x) + g(x) k_b(x). Throws DomainError outside the state domain.
Vec eval_closed_loop(const SystemModel& model, const BackupPolicy& policy,
                     const Vec& x);
// d/dx of the closed-loop field. Throws DomainError outside the domain.
Mat eval_closed_loop_jacobian(const SystemModel& model,
                              const BackupPolicy& policy, const Vec& x);

// Unchecked variants used inside integrators, where intermediate points may
// legitimately sit slightly outside the nominal domain.
Vec closed_loop_field(const SystemModel& model, const BackupPolicy& policy,
                      const Vec& x);
Mat closed_loop_jacobian(const SystemModel& model, const BackupPolicy& policy,
                         const Vec& x);

// -(1/kappa) log(sum_i exp(-kappa v_i)), evaluated with a max shift.
double softmin_barrier(const Vec& values, double kappa);
// Gradient weights of softmin_barrier w.r.t. values (a probability vector).
Vec softmin_weights(const Vec& values, double kappa);

// Everything needed to simulate and filter one case study.
struct Scenario {
  std::string name;
  SystemModel model;
  DisturbanceTruth truth;
  BackupPolicy backup;
  BarrierSpec barriers;
  PrimaryController primary;

  // Defaults; every one of these is overridable through SimConfig.
  Vec x0;
  double flow_horizon = 1.0;
  double flow_delta = 0.1;
  double t_final = 10.0;
  double control_dt = 0.01;
  std::string bound_kind = "gronwall";
  // Region sampled by the subset verification.
  Box verification_box;
  // Index of the state component reported as "speed" in comparisons.
  int speed_index = 0;
};

struct DoubleIntegratorParams {
  double omega = 0.2;
  double delta_d = 0.08;
  double hb_kappa = 10.0;
};

Scenario make_double_integrator(const DoubleIntegratorParams& params = {});
Scenario make_double_integrator(double omega);

struct QuadrotorParams {
  double gravity = 9.81;
  double mass = 1.0;
  double inertia = 0.25;
  double f_max = 20.0;
  double m_max = 20.0;
  double k_p = 1.0;
  double k_d = 1.01;
  double kappa = 5.0;
  double theta_max = 55.0 * 3.14159265358979323846 / 180.0;
  double theta_dot_max = 3.0;
  double z_min = 0.5;
};

Scenario make_planar_quadrotor(const QuadrotorParams& params = {});

// Sufficient conditions under which the quadrotor backup controller keeps
// its backup set robustly invariant while respecting the input box.
struct QuadrotorBackupConditions {
  double required_thrust = 0.0;  // m (g + delta_d) / cos(theta_max)
  bool thrust_ok = false;        // f_max >= required_thrust
  bool damping_ok = false;       // k_d^2 > 4 J k_p
  bool moment_ok = false;        // m_max >= k_p theta_max + k_d theta_dot_max
  bool all() const { return thrust_ok && damping_ok && moment_ok; }
};

QuadrotorBackupConditions check_quadrotor_backup(const QuadrotorParams& params,
                                                 double delta_d);

// Largest |grad h_b| over a regular grid on a box (grid_points per axis,
// restricted to the axes listed in active_axes; other axes at the center).
double sampled_gradient_bound(const std::function<RowVec(const Vec&)>& grad,
                              const Box& box,
                              const std::vector<int>& active_axes,
                              int grid_points);

std::vector<std::string> scenario_names();
// Throws ConfigError on an unknown name.
Scenario make_scenario(const std::string& name, double omega,
                       double z_min = 0.5);

}  // namespace uebcbf

#endif  // UEBCBF_SYSTEMS_HPP_
