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
#include "uebcbf/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "uebcbf/errors.hpp"

namespace uebcbf {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kObserver:
      return "observer";
    case EstimatorKind::kWorstCase:
      return "worst_case";
    case EstimatorKind::kNone:
      return "none";
  }
  return "observer";
}

EstimatorKind parse_estimator_kind(const std::string& s) {
  if (s == "observer") return EstimatorKind::kObserver;
  if (s == "worst_case") return EstimatorKind::kWorstCase;
  if (s == "none") return EstimatorKind::kNone;
  throw ConfigError("unknown estimator kind: " + s);
}

void ObserverParams::validate() const {
  if (lambda.size() == 0 || !(lambda.array() > 0.0).all()) {
    throw std::invalid_argument("observer gains must be positive");
  }
  if (delta_d < 0.0 || delta_v < 0.0) {
    throw std::invalid_argument("disturbance bounds must be >= 0");
  }
}

EstimatorState init_observer(const Vec& x0, double t0) {
  return EstimatorState{x0, Vec::Zero(x0.size()), t0};
}

Vec observer_estimate(const ObserverParams& params, const Vec& x,
                      const Vec& xi) {
  return params.lambda.cwiseProduct(x - xi);
}

Vec observer_rate(const ObserverParams& params, const SystemModel& model,
                  const Vec& x, const Vec& u, const Vec& xi) {
  return model.drift(x) + model.input_matrix(x) * u +
         observer_estimate(params, x, xi);
}

EstimatorState observer_step(const ObserverParams& params,
                             const EstimatorState& state, const Vec& x,
                             const Vec& u, const SystemModel& model,
                             double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("observer_step: dt must be > 0");
  if (!x.allFinite() || !u.allFinite() || !state.xi.allFinite()) {
    throw NumericalError("observer_step: non-finite input");
  }
  // With x and u frozen, only the Lambda (x - xi) term varies over the step.
  const Vec k1 = observer_rate(params, model, x, u, state.xi);
  const Vec k2 = observer_rate(params, model, x, u, state.xi + 0.5 * dt * k1);
  const Vec k3 = observer_rate(params, model, x, u, state.xi + 0.5 * dt * k2);
  const Vec k4 = observer_rate(params, model, x, u, state.xi + dt * k3);
  EstimatorState next;
  next.xi = state.xi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next.d_hat = observer_estimate(params, x, next.xi);
  next.t = state.t + dt;
  if (!next.xi.allFinite()) {
    throw NumericalError("observer_step: non-finite result");
  }
  return next;
}

ErrorBoundModel make_error_bound_model(EstimatorKind kind,
                                       const ObserverParams& params) {
  ErrorBoundModel m;
  m.kind = kind;
  m.lambda_min = params.lambda.size() > 0 ? params.lambda_min() : 1.0;
  m.delta_d = params.delta_d;
  m.delta_v = params.delta_v;
  return m;
}

double error_bound(const ErrorBoundModel& model, double t) {
  if (t < 0.0) throw DomainError("error_bound: t must be >= 0");
  switch (model.kind) {
    case EstimatorKind::kObserver: {
      const double decay = std::exp(-model.lambda_min * t);
      return decay * model.delta_d +
             (model.delta_v / model.lambda_min) * (1.0 - decay);
    }
    case EstimatorKind::kWorstCase:
      return model.delta_d;
    case EstimatorKind::kNone:
      return 0.0;
  }
  return 0.0;
}

double error_bound_derivative(const ErrorBoundModel& model, double t) {
  if (t < 0.0) throw DomainError("error_bound_derivative: t must be >= 0");
  if (model.kind != EstimatorKind::kObserver) return 0.0;
  return (model.delta_v - model.lambda_min * model.delta_d) *
         std::exp(-model.lambda_min * t);
}

double estimate_rate_bound(const ObserverParams& params, double e_bar) {
  if (e_bar < 0.0) throw DomainError("estimate_rate_bound: e_bar must be >= 0");
  return params.lambda.maxCoeff() * e_bar;
}

}  // namespace uebcbf
