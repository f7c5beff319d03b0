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
#include "uebcbf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uebcbf/errors.hpp"
#include "uebcbf/estimator.hpp"

namespace uebcbf {

namespace {

struct Control {
  Vec u;
  ControlMode mode = ControlMode::kBackup;
  std::string status;
  double hb_T = 0.0;
  double min_h_margin = 0.0;
};

Control compute_control(const SimSetup& s, const Vec& x, double t,
                        const Vec& d_hat, double& worst_violation) {
  const Scenario& sc = s.scenario;
  Control c;
  if (s.controller == ControllerKind::kCbfQp) {
    const Vec u_des = sc.primary(x);
    const CbfStep step =
        vanilla_cbf_qp_step(x, sc.barriers, sc.model, s.filter.alpha, u_des);
    c.status = to_string(step.solution.status);
    c.hb_T = sc.barriers.h_b(x);
    c.min_h_margin = sc.barriers.h(x);
    if (step.solution.status == QpStatus::kOptimal) {
      c.u = step.solution.u;
      c.mode = ControlMode::kQp;
    } else {
      c.u = sc.model.clip_input(sc.backup.control(x));
    }
    return c;
  }
  const SafeStep step = safe_controller_step(sc, s.filter, x, t, d_hat);
  c.u = step.u;
  c.mode = step.mode;
  c.status = step.qp_status;
  c.hb_T = step.hb_T;
  c.min_h_margin = step.min_h_margin;
  if (step.mode == ControlMode::kQp) {
    for (const auto& row : step.rows) {
      worst_violation = std::max(worst_violation, row.b - row.a.dot(step.u));
    }
  }
  return c;
}

}  // namespace

SimRecord run_simulation(const SimConfig& config) {
  return run_simulation(resolve(config));
}

SimRecord run_simulation(const SimSetup& s) {
  const Scenario& sc = s.scenario;
  const SystemModel& model = sc.model;
  const int n = model.n;
  const bool observer = s.filter.kind == EstimatorKind::kObserver;
  const Vec& lambda = s.filter.observer.lambda;

  SimRecord rec;
  rec.n = n;
  rec.m = model.m;
  const long steps = std::lround(s.t_final / s.control_dt);
  rec.rows.reserve(steps + 1);

  Vec x = s.x0;
  EstimatorState est = init_observer(x, 0.0);
  const double h = s.control_dt / s.sim_substeps;

  // Plant and observer share one state vector w = [x; xi] so that the
  // estimator sees the same continuous-time signal as the plant.
  auto rhs = [&](double t, const Vec& w, const Vec& u) {
    const Vec xs = w.head(n);
    const Vec xi = w.tail(n);
    const Vec fgu = model.drift(xs) + model.input_matrix(xs) * u;
    Vec out(2 * n);
    out.head(n) = fgu + sc.truth.d(t);
    out.tail(n) = fgu + lambda.cwiseProduct(xs - xi);
    return out;
  };

  try {
    for (long k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * s.control_dt;
      if (!x.allFinite()) throw NumericalError("non-finite state");
      const Vec d_hat = observer ? observer_estimate(s.filter.observer, x,
                                                     est.xi)
                                 : Vec::Zero(n);
      const Control c = compute_control(s, x, t, d_hat, rec.worst_row_violation);

      SimRow row;
      row.t = t;
      row.x = x;
      row.u = c.u;
      row.mode = to_string(c.mode);
      row.d_true = sc.truth.d(t);
      row.d_hat = d_hat;
      row.e_bar = error_bound(s.filter.error_model, t);
      row.h = sc.barriers.h(x);
      row.hb_T = c.hb_T;
      row.min_h_margin = c.min_h_margin;
      row.qp_status = c.status;
      rec.rows.push_back(std::move(row));
      if (k == steps) break;

      if (observer && !s.continuous_observer) {
        est = observer_step(s.filter.observer, est, x, c.u, model,
                            s.control_dt);
      }
      Vec w(2 * n);
      w << x, est.xi;
      for (int j = 0; j < s.sim_substeps; ++j) {
        const double tj = t + j * h;
        const Vec k1 = rhs(tj, w, c.u);
        const Vec k2 = rhs(tj + 0.5 * h, w + 0.5 * h * k1, c.u);
        const Vec k3 = rhs(tj + 0.5 * h, w + 0.5 * h * k2, c.u);
        const Vec k4 = rhs(tj + h, w + h * k3, c.u);
        w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      x = w.head(n);
      if (observer && s.continuous_observer) est.xi = w.tail(n);
    }
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.message = e.what();
  }
  return rec;
}

RunSummary summarize(const SimRecord& record, const SimSetup& setup) {
  RunSummary s;
  s.min_h = std::numeric_limits<double>::infinity();
  s.min_hb_T = std::numeric_limits<double>::infinity();
  const SystemModel& model = setup.scenario.model;
  const int speed = setup.scenario.speed_index;
  long saturated = 0;
  const std::string* prev = nullptr;
  for (const auto& r : record.rows) {
    s.min_h = std::min(s.min_h, r.h);
    s.min_hb_T = std::min(s.min_hb_T, r.hb_T);
    s.max_abs_speed = std::max(s.max_abs_speed, std::abs(r.x[speed]));
    bool sat = false;
    for (int j = 0; j < model.m; ++j) {
      if (r.u[j] < model.input_lower[j] || r.u[j] > model.input_upper[j]) {
        s.inputs_in_box = false;
      }
      if (r.u[j] == model.input_lower[j] || r.u[j] == model.input_upper[j]) {
        sat = true;
      }
    }
    saturated += sat ? 1 : 0;
    if (prev && *prev != r.mode) ++s.mode_switches;
    prev = &r.mode;
    const double err = (r.d_true - r.d_hat).norm();
    s.max_estimate_error = std::max(s.max_estimate_error, err);
    if (r.e_bar > 0.0) {
      s.max_containment_ratio = std::max(s.max_containment_ratio, err / r.e_bar);
    } else if (err > 0.0) {
      s.max_containment_ratio = std::numeric_limits<double>::infinity();
    }
  }
  if (!record.rows.empty()) {
    s.saturation_fraction =
        static_cast<double>(saturated) / static_cast<double>(record.rows.size());
  }
  return s;
}

}  // namespace uebcbf
