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
#ifndef UEBCBF_ESTIMATOR_HPP_
#define UEBCBF_ESTIMATOR_HPP_

#include <string>

#include "uebcbf/linalg.hpp"
#include "uebcbf/systems.hpp"

namespace uebcbf {

// observer: first-order disturbance observer with a decaying error bound.
// worst_case: d_hat = 0 with the constant bound delta_d.
// none: d_hat = 0 and a zero bound (ignores the disturbance; unsound).
enum class EstimatorKind { kObserver, kWorstCase, kNone };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(const std::string& s);

struct ObserverParams {
  Vec lambda;  // diagonal of the gain matrix, all entries > 0
  double delta_d = 0.0;
  double delta_v = 0.0;

  double lambda_min() const { return lambda.minCoeff(); }
  void validate() const;
};

struct EstimatorState {
  Vec xi;
  Vec d_hat;
  double t = 0.0;
};

// xi(0) = x0, so d_hat(0) = 0.
EstimatorState init_observer(const Vec& x0, double t0 = 0.0);

// d_hat = Lambda (x - xi).
Vec observer_estimate(const ObserverParams& params, const Vec& x,
                      const Vec& xi);

// xi' = f(x) + g(x) u + Lambda (x - xi).
Vec observer_rate(const ObserverParams& params, const SystemModel& model,
                  const Vec& x, const Vec& u, const Vec& xi);

// One RK4 step of the auxiliary state with x and u held over the step,
// followed by d_hat = Lambda (x - xi). Throws NumericalError on non-finite
// inputs and std::invalid_argument when dt <= 0.
EstimatorState observer_step(const ObserverParams& params,
                             const EstimatorState& state, const Vec& x,
                             const Vec& u, const SystemModel& model, double dt);

// Known bound e_bar(t) on |d(t) - d_hat(t)|.
struct ErrorBoundModel {
  EstimatorKind kind = EstimatorKind::kObserver;
  double lambda_min = 1.0;
  double delta_d = 0.0;
  double delta_v = 0.0;
};

ErrorBoundModel make_error_bound_model(EstimatorKind kind,
                                       const ObserverParams& params);

// Throws DomainError for t < 0.
double error_bound(const ErrorBoundModel& model, double t);
double error_bound_derivative(const ErrorBoundModel& model, double t);

// |d_hat'| = |Lambda e| <= max(lambda) e_bar.
double estimate_rate_bound(const ObserverParams& params, double e_bar);

}  // namespace uebcbf

#endif  // UEBCBF_ESTIMATOR_HPP_
