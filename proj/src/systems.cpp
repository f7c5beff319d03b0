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
#include "uebcbf/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "uebcbf/errors.hpp"

namespace uebcbf {

bool Box::contains(const Vec& x) const {
  if (x.size() != lower.size()) return false;
  for (int i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

Box Box::inflated(double factor) const {
  const Vec c = center();
  const Vec half = 0.5 * (upper - lower);
  return Box{c - factor * half, c + factor * half};
}

void SystemModel::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("SystemModel: n, m >= 1");
  if (input_lower.size() != m || input_upper.size() != m) {
    throw std::invalid_argument("SystemModel: input bounds must have size m");
  }
  if (!(input_lower.array() < input_upper.array()).all()) {
    throw std::invalid_argument("SystemModel: input_lower < input_upper");
  }
  if (state_domain.dim() != n) {
    throw std::invalid_argument("SystemModel: state_domain must have size n");
  }
  if (!drift || !input_matrix || !drift_jacobian || !input_jacobian) {
    throw std::invalid_argument("SystemModel: missing callable");
  }
}

bool SystemModel::input_admissible(const Vec& u, double tol) const {
  if (u.size() != m) return false;
  return (u.array() >= input_lower.array() - tol).all() &&
         (u.array() <= input_upper.array() + tol).all();
}

Vec SystemModel::clip_input(const Vec& u) const {
  return u.cwiseMax(input_lower).cwiseMin(input_upper);
}

ClassKappa::ClassKappa(double s) : slope(s) {
  if (!(s > 0.0)) throw std::invalid_argument("ClassKappa: slope must be > 0");
}

namespace {

void require_in_domain(const SystemModel& model, const Vec& x) {
  if (!model.state_domain.contains(x)) {
    std::ostringstream os;
    os << "state outside domain: [" << x.transpose() << "]";
    throw DomainError(os.str());
  }
}

}  // namespace

Vec closed_loop_field(const SystemModel& model, const BackupPolicy& policy,
                      const Vec& x) {
  return model.drift(x) + model.input_matrix(x) * policy.control(x);
}

Mat closed_loop_jacobian(const SystemModel& model, const BackupPolicy& policy,
                         const Vec& x) {
  const Vec u = policy.control(x);
  return model.drift_jacobian(x) + model.input_jacobian(x, u) +
         model.input_matrix(x) * policy.jacobian(x);
}

Vec eval_closed_loop(const SystemModel& model, const BackupPolicy& policy,
                     const Vec& x) {
  require_in_domain(model, x);
  return closed_loop_field(model, policy, x);
}

Mat eval_closed_loop_jacobian(const SystemModel& model,
                              const BackupPolicy& policy, const Vec& x) {
  require_in_domain(model, x);
  return closed_loop_jacobian(model, policy, x);
}

double softmin_barrier(const Vec& values, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("softmin: kappa must be > 0");
  if (values.size() == 0) throw std::invalid_argument("softmin: empty input");
  const double lo = values.minCoeff();
  double sum = 0.0;
  for (int i = 0; i < values.size(); ++i) {
    sum += std::exp(-kappa * (values[i] - lo));
  }
  return lo - std::log(sum) / kappa;
}

Vec softmin_weights(const Vec& values, double kappa) {
  const double lo = values.minCoeff();
  Vec w(values.size());
  for (int i = 0; i < values.size(); ++i) {
    w[i] = std::exp(-kappa * (values[i] - lo));
  }
  return w / w.sum();
}

double sampled_gradient_bound(const std::function<RowVec(const Vec&)>& grad,
                              const Box& box,
                              const std::vector<int>& active_axes,
                              int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");
  const int k = static_cast<int>(active_axes.size());
  long total = 1;
  for (int i = 0; i < k; ++i) total *= grid_points;
  double best = 0.0;
  Vec x = box.center();
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int a = 0; a < k; ++a) {
      const int axis = active_axes[a];
      const int j = static_cast<int>(rem % grid_points);
      rem /= grid_points;
      x[axis] = box.lower[axis] + (box.upper[axis] - box.lower[axis]) * j /
                                      (grid_points - 1);
    }
    best = std::max(best, grad(x).norm());
  }
  return best;
}

Scenario make_double_integrator(const DoubleIntegratorParams& params) {
  if (params.omega < 0.0) throw std::invalid_argument("omega must be >= 0");
  Scenario s;
  s.name = "double-integrator";

  SystemModel& m = s.model;
  m.n = 2;
  m.m = 1;
  m.drift = [](const Vec& x) { return Vec{{x[1], 0.0}}; };
  m.input_matrix = [](const Vec&) { return Mat{{0.0}, {1.0}}; };
  m.drift_jacobian = [](const Vec&) { return Mat{{0.0, 1.0}, {0.0, 0.0}}; };
  m.input_jacobian = [](const Vec&, const Vec&) { return Mat::Zero(2, 2); };
  m.input_lower = Vec::Constant(1, -1.0);
  m.input_upper = Vec::Constant(1, 1.0);
  m.state_domain = Box{Vec::Constant(2, -5.0), Vec::Constant(2, 5.0)};

  const double dd = params.delta_d;
  const double w = params.omega;
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  s.truth.d = [dd, w](double t) {
    return Vec{{dd * std::sin(w * t + kQuarterPi),
                dd * std::cos(w * t + kQuarterPi)}};
  };
  s.truth.d_dot = [dd, w](double t) {
    return Vec{{dd * w * std::cos(w * t + kQuarterPi),
                -dd * w * std::sin(w * t + kQuarterPi)}};
  };
  s.truth.delta_d = dd;
  s.truth.delta_v = dd * w;

  s.backup.control = [](const Vec&) { return Vec::Constant(1, -1.0); };
  s.backup.jacobian = [](const Vec&) { return Mat::Zero(1, 2); };
  s.backup.admissible = true;

  const double kappa = params.hb_kappa;
  BarrierSpec& b = s.barriers;
  b.h = [](const Vec& x) { return -x[0]; };
  b.grad_h = [](const Vec&) { return RowVec{{-1.0, 0.0}}; };
  b.h_b = [kappa](const Vec& x) {
    return softmin_barrier(Vec{{-x[0], -x[1]}}, kappa);
  };
  b.grad_h_b = [kappa](const Vec& x) {
    const Vec wts = softmin_weights(Vec{{-x[0], -x[1]}}, kappa);
    return RowVec{{-wts[0], -wts[1]}};
  };
  // grad h_b is a convex combination of orthogonal unit vectors.
  b.lipschitz_h = 1.0;
  b.lipschitz_hb = 1.0;

  s.primary = [](const Vec&) { return Vec::Constant(1, 1.0); };

  s.x0 = Vec{{-2.0, 0.0}};
  s.flow_horizon = 2.0;
  s.flow_delta = 0.1;
  s.t_final = 12.0;
  s.control_dt = 0.01;
  s.bound_kind = "gronwall";
  s.verification_box = Box{Vec{{-2.0, -1.5}}, Vec{{0.5, 1.5}}};
  s.speed_index = 1;
  return s;
}

Scenario make_double_integrator(double omega) {
  DoubleIntegratorParams p;
  p.omega = omega;
  return make_double_integrator(p);
}

Scenario make_planar_quadrotor(const QuadrotorParams& p) {
  Scenario s;
  s.name = "quadrotor";

  // State (x, z, theta, x', z', theta'), input (F, M).
  SystemModel& m = s.model;
  m.n = 6;
  m.m = 2;
  const double g = p.gravity;
  const double mass = p.mass;
  const double inertia = p.inertia;
  m.drift = [g](const Vec& x) {
    return Vec{{x[3], x[4], x[5], 0.0, -g, 0.0}};
  };
  m.input_matrix = [mass, inertia](const Vec& x) {
    Mat gm = Mat::Zero(6, 2);
    gm(3, 0) = std::sin(x[2]) / mass;
    gm(4, 0) = std::cos(x[2]) / mass;
    gm(5, 1) = -1.0 / inertia;
    return gm;
  };
  m.drift_jacobian = [](const Vec&) {
    Mat a = Mat::Zero(6, 6);
    a(0, 3) = a(1, 4) = a(2, 5) = 1.0;
    return a;
  };
  m.input_jacobian = [mass](const Vec& x, const Vec& u) {
    Mat a = Mat::Zero(6, 6);
    a(3, 2) = std::cos(x[2]) * u[0] / mass;
    a(4, 2) = -std::sin(x[2]) * u[0] / mass;
    return a;
  };
  m.input_lower = Vec{{0.0, -p.m_max}};
  m.input_upper = Vec{{p.f_max, p.m_max}};
  constexpr double kPi = std::numbers::pi;
  m.state_domain = Box{Vec{{-100.0, -20.0, -kPi, -20.0, -10.0, -10.0}},
                       Vec{{100.0, 20.0, kPi, 20.0, 10.0, 10.0}}};

  s.truth.d = [](double t) {
    return Vec{{0.0, 0.0, 0.0, 1.0, 0.5 * std::sin(0.3 * t - kPi / 3.0),
                0.0}};
  };
  s.truth.d_dot = [](double t) {
    return Vec{{0.0, 0.0, 0.0, 0.0, 0.15 * std::cos(0.3 * t - kPi / 3.0),
                0.0}};
  };
  // Suprema of |(1, 0.5 sin)| and |(0, 0.15 cos)|.
  s.truth.delta_d = std::sqrt(1.25);
  s.truth.delta_v = 0.15;

  const double f_max = p.f_max;
  const double kp = p.k_p;
  const double kd = p.k_d;
  const double m_max = p.m_max;
  s.backup.control = [f_max, kp, kd](const Vec& x) {
    return Vec{{f_max, kp * x[2] + kd * x[5]}};
  };
  s.backup.jacobian = [kp, kd](const Vec&) {
    Mat k = Mat::Zero(2, 6);
    k(1, 2) = kp;
    k(1, 5) = kd;
    return k;
  };
  // |k_p theta + k_d theta'| over the domain must fit the moment limit.
  s.backup.admissible = kp * kPi + kd * 10.0 <= m_max;

  const double z_min = p.z_min;
  const double kappa = p.kappa;
  const double th2 = p.theta_max * p.theta_max;
  const double thd2 = p.theta_dot_max * p.theta_dot_max;
  auto components = [th2, thd2](const Vec& x) {
    return Vec{{x[4], th2 - x[2] * x[2], thd2 - x[5] * x[5]}};
  };
  BarrierSpec& b = s.barriers;
  b.h = [z_min](const Vec& x) { return x[1] - z_min; };
  b.grad_h = [](const Vec&) {
    RowVec r = RowVec::Zero(6);
    r[1] = 1.0;
    return r;
  };
  b.h_b = [components, kappa](const Vec& x) {
    return softmin_barrier(components(x), kappa);
  };
  b.grad_h_b = [components, kappa](const Vec& x) {
    const Vec w = softmin_weights(components(x), kappa);
    RowVec r = RowVec::Zero(6);
    r[4] = w[0];
    r[2] = -2.0 * x[2] * w[1];
    r[5] = -2.0 * x[5] * w[2];
    return r;
  };
  b.lipschitz_h = 1.0;
  b.lipschitz_hb =
      sampled_gradient_bound(b.grad_h_b, m.state_domain, {2, 4, 5}, 41);

  s.primary = [](const Vec&) { return Vec::Zero(2); };

  s.x0 = Vec{{0.0, 3.0, 0.0, 0.0, 0.0, 0.0}};
  s.flow_horizon = 0.2;
  s.flow_delta = 0.02;
  s.t_final = 10.0;
  s.control_dt = 0.01;
  s.bound_kind = "lognorm";
  s.verification_box =
      Box{Vec{{-1.0, z_min - 0.5, -1.0, -2.0, -5.0, -3.0}},
          Vec{{1.0, z_min + 5.5, 1.0, 2.0, 5.0, 3.0}}};
  s.speed_index = 4;
  return s;
}

QuadrotorBackupConditions check_quadrotor_backup(const QuadrotorParams& p,
                                                 double delta_d) {
  QuadrotorBackupConditions c;
  c.required_thrust = p.mass * (p.gravity + delta_d) / std::cos(p.theta_max);
  c.thrust_ok = p.f_max >= c.required_thrust;
  c.damping_ok = p.k_d * p.k_d > 4.0 * p.inertia * p.k_p;
  c.moment_ok = p.m_max >= p.k_p * p.theta_max + p.k_d * p.theta_dot_max;
  return c;
}

std::vector<std::string> scenario_names() {
  return {"double-integrator", "quadrotor"};
}

Scenario make_scenario(const std::string& name, double omega, double z_min) {
  if (name == "double-integrator") return make_double_integrator(omega);
  if (name == "quadrotor") {
    QuadrotorParams p;
    p.z_min = z_min;
    return make_planar_quadrotor(p);
  }
  throw ConfigError("unknown scenario: " + name);
}

}  // namespace uebcbf
