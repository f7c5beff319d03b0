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
#include "uebcbf/filter.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "uebcbf/errors.hpp"

namespace uebcbf {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kUeBcbf:
      return "ue-bcbf";
    case ControllerKind::kDrBcbf:
      return "dr-bcbf";
    case ControllerKind::kBcbf:
      return "bcbf";
    case ControllerKind::kCbfQp:
      return "cbf-qp";
  }
  return "?";
}

ControllerKind parse_controller_kind(const std::string& s) {
  if (s == "ue-bcbf") return ControllerKind::kUeBcbf;
  if (s == "dr-bcbf") return ControllerKind::kDrBcbf;
  if (s == "bcbf") return ControllerKind::kBcbf;
  if (s == "cbf-qp") return ControllerKind::kCbfQp;
  throw ConfigError("unknown controller '" + s + "'");
}

EstimatorKind default_estimator(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kUeBcbf:
      return EstimatorKind::kObserver;
    case ControllerKind::kDrBcbf:
      return EstimatorKind::kWorstCase;
    default:
      return EstimatorKind::kNone;
  }
}

std::string to_string(ControlMode mode) {
  return mode == ControlMode::kQp ? "qp" : "backup";
}

double robustness_terms(const RowVec& grad, const Mat& Phi, const Mat& Theta,
                        const Vec& lambda, double e_bar, EstimatorKind kind) {
  if (e_bar < 0.0) throw DomainError("robustness_terms: e_bar < 0");
  switch (kind) {
    case EstimatorKind::kNone:
      return 0.0;
    case EstimatorKind::kWorstCase:
      return e_bar * (grad * Phi).norm();
    case EstimatorKind::kObserver:
      break;
  }
  const RowVec w = grad * (Phi + Theta * lambda.asDiagonal());
  return e_bar * w.norm();
}

std::vector<ConstraintRow> build_constraints(const ConstraintInputs& in) {
  const FlowBundle& bundle = *in.bundle;
  const TighteningSchedule& sched = *in.schedule;
  const BarrierSpec& bar = *in.barriers;
  const Mat g = in.model->input_matrix(in.x);
  const Vec drift = in.model->drift(in.x) + in.d_hat;
  const int nodes = bundle.nodes();
  if (static_cast<int>(sched.eps.size()) != nodes) {
    throw std::invalid_argument("build_constraints: schedule/grid mismatch");
  }

  std::vector<ConstraintRow> rows;
  rows.reserve(nodes + 1);
  auto make_row = [&](const RowVec& grad, double hval, double eps,
                      double deps_dt, const Mat& Phi, const Mat& Theta,
                      const ClassKappa& alpha) {
    const RowVec gp = grad * Phi;
    const double rho =
        robustness_terms(grad, Phi, Theta, in.lambda, in.e_bar, in.kind);
    ConstraintRow row;
    row.a = gp * g;
    row.b = -gp.dot(drift) - alpha(hval - eps) + deps_dt + rho;
    return row;
  };

  for (int k = 0; k < nodes; ++k) {
    const Vec& p = bundle.phi[k];
    ConstraintRow row = make_row(bar.grad_h(p), bar.h(p), sched.eps[k],
                                 sched.deps_dt[k], bundle.Phi[k],
                                 bundle.Theta[k], in.alpha);
    row.tag = ConstraintTag::kTrajectory;
    row.node = k;
    rows.push_back(std::move(row));
  }
  const Vec& pT = bundle.phi.back();
  ConstraintRow term = make_row(bar.grad_h_b(pT), bar.h_b(pT), sched.eps_b,
                                sched.deps_b_dt, bundle.Phi.back(),
                                bundle.Theta.back(), in.alpha_b);
  term.tag = ConstraintTag::kTerminal;
  term.node = nodes - 1;
  rows.push_back(std::move(term));
  return rows;
}

std::vector<ConstraintRow> build_nominal_constraints(
    const NominalFlow& flow, const BarrierSpec& barriers,
    const SystemModel& model, const Vec& x, ClassKappa alpha,
    ClassKappa alpha_b) {
  const Mat g = model.input_matrix(x);
  const Vec f = model.drift(x);
  const int nodes = static_cast<int>(flow.phi.size());
  std::vector<ConstraintRow> rows;
  rows.reserve(nodes + 1);
  for (int k = 0; k < nodes; ++k) {
    const RowVec gp = barriers.grad_h(flow.phi[k]) * flow.Phi[k];
    ConstraintRow row;
    row.a = gp * g;
    row.b = -gp.dot(f) - alpha(barriers.h(flow.phi[k]));
    row.tag = ConstraintTag::kTrajectory;
    row.node = k;
    rows.push_back(std::move(row));
  }
  const RowVec gp = barriers.grad_h_b(flow.phi.back()) * flow.Phi.back();
  ConstraintRow term;
  term.a = gp * g;
  term.b = -gp.dot(f) - alpha_b(barriers.h_b(flow.phi.back()));
  term.tag = ConstraintTag::kTerminal;
  term.node = nodes - 1;
  rows.push_back(std::move(term));
  return rows;
}

SafeStep safe_controller_step(const Scenario& scenario,
                              const FilterSettings& settings, const Vec& x,
                              double t, const Vec& d_hat) {
  const SystemModel& model = scenario.model;
  if (!model.state_domain.contains(x)) {
    throw DomainError("safe_controller_step: state outside domain");
  }
  const double e_bar = error_bound(settings.error_model, t);
  const double e_bar_dot = error_bound_derivative(settings.error_model, t);

  const FlowBundle bundle = integrate_flow_bundle(
      model, scenario.backup, x, d_hat, settings.grid, settings.substeps);
  const TighteningSchedule sched =
      build_tightening(settings.bounds, e_bar, e_bar_dot, settings.grid);

  ConstraintInputs in;
  in.bundle = &bundle;
  in.schedule = &sched;
  in.barriers = &scenario.barriers;
  in.model = &model;
  in.x = x;
  in.d_hat = d_hat;
  in.alpha = settings.alpha;
  in.alpha_b = settings.alpha_b;
  in.kind = settings.kind;
  in.lambda = settings.observer.lambda;
  in.e_bar = e_bar;

  SafeStep step;
  step.rows = build_constraints(in);
  step.hb_T = scenario.barriers.h_b(bundle.phi.back());
  step.min_h_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < bundle.nodes(); ++k) {
    step.min_h_margin = std::min(
        step.min_h_margin, scenario.barriers.h(bundle.phi[k]) - sched.eps[k]);
  }

  QpProblem qp{scenario.primary(x), step.rows, model.input_lower,
               model.input_upper};
  try {
    const QpSolution sol = solve_qp(qp);
    step.qp_status = to_string(sol.status);
    if (sol.status == QpStatus::kOptimal) {
      step.u = sol.u;
      step.mode = ControlMode::kQp;
      return step;
    }
  } catch (const SolverStalled&) {
    step.qp_status = "stalled";
  }
  step.u = model.clip_input(scenario.backup.control(x));
  step.mode = ControlMode::kBackup;
  return step;
}

CbfStep vanilla_cbf_qp_step(const Vec& x, const BarrierSpec& barriers,
                            const SystemModel& model, ClassKappa alpha,
                            const Vec& u_des) {
  const RowVec grad = barriers.grad_h(x);
  CbfStep out;
  out.row.a = grad * model.input_matrix(x);
  out.row.b = -alpha(barriers.h(x)) - grad.dot(model.drift(x));
  out.row.tag = ConstraintTag::kCbf;
  out.solution =
      solve_qp(QpProblem{u_des, {out.row}, model.input_lower, model.input_upper});
  return out;
}

}  // namespace uebcbf
