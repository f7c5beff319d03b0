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
#ifndef UEBCBF_FILTER_HPP_
#define UEBCBF_FILTER_HPP_

#include <string>
#include <vector>

#include "uebcbf/bounds.hpp"
#include "uebcbf/estimator.hpp"
#include "uebcbf/flow.hpp"
#include "uebcbf/linalg.hpp"
#include "uebcbf/qp.hpp"
#include "uebcbf/systems.hpp"

namespace uebcbf {

enum class ControllerKind { kUeBcbf, kDrBcbf, kBcbf, kCbfQp };

std::string to_string(ControllerKind kind);
ControllerKind parse_controller_kind(const std::string& s);
// Estimator kind each controller uses unless overridden.
EstimatorKind default_estimator(ControllerKind kind);

// e_bar |grad (Phi + Theta diag(lambda))| for the observer, e_bar |grad Phi|
// for worst_case (the estimate is frozen), 0 for none.
double robustness_terms(const RowVec& grad, const Mat& Phi, const Mat& Theta,
                        const Vec& lambda, double e_bar, EstimatorKind kind);

struct ConstraintInputs {
  const FlowBundle* bundle = nullptr;
  const TighteningSchedule* schedule = nullptr;
  const BarrierSpec* barriers = nullptr;
  const SystemModel* model = nullptr;
  Vec x;
  Vec d_hat;
  ClassKappa alpha{5.0};
  ClassKappa alpha_b{5.0};
  EstimatorKind kind = EstimatorKind::kObserver;
  Vec lambda;
  double e_bar = 0.0;
};

// N+1 trajectory rows followed by one terminal row.
std::vector<ConstraintRow> build_constraints(const ConstraintInputs& in);

// Plain backup CBF rows from the undisturbed flow.
std::vector<ConstraintRow> build_nominal_constraints(
    const NominalFlow& flow, const BarrierSpec& barriers,
    const SystemModel& model, const Vec& x, ClassKappa alpha,
    ClassKappa alpha_b);

struct FilterSettings {
  EstimatorKind kind = EstimatorKind::kObserver;
  ObserverParams observer;
  ErrorBoundModel error_model;
  BoundParams bounds;
  FlowGrid grid{1.0, 0.1};
  int substeps = 4;
  ClassKappa alpha{5.0};
  ClassKappa alpha_b{5.0};
};

enum class ControlMode { kQp, kBackup };

std::string to_string(ControlMode mode);

struct SafeStep {
  Vec u;
  ControlMode mode = ControlMode::kBackup;
  // "optimal", "infeasible" or "stalled".
  std::string qp_status;
  double hb_T = 0.0;
  double min_h_margin = 0.0;
  std::vector<ConstraintRow> rows;
};

// Backup-filtered control at (x, t) given the current estimate. Propagates
// FlowEscapeError and DomainError.
SafeStep safe_controller_step(const Scenario& scenario,
                              const FilterSettings& settings, const Vec& x,
                              double t, const Vec& d_hat);

struct CbfStep {
  ConstraintRow row;
  QpSolution solution;
};

CbfStep vanilla_cbf_qp_step(const Vec& x, const BarrierSpec& barriers,
                            const SystemModel& model, ClassKappa alpha,
                            const Vec& u_des);

}  // namespace uebcbf

#endif  // UEBCBF_FILTER_HPP_
