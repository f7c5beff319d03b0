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
#ifndef UEBCBF_QP_HPP_
#define UEBCBF_QP_HPP_

#include <string>
#include <vector>

#include "uebcbf/linalg.hpp"

namespace uebcbf {

enum class ConstraintTag { kTrajectory, kTerminal, kCbf, kOther };

// a u >= b.
struct ConstraintRow {
  RowVec a;
  double b = 0.0;
  ConstraintTag tag = ConstraintTag::kOther;
  int node = -1;  // grid node for trajectory rows
};

// min |u_des - u|^2  s.t.  rows, lower <= u <= upper.
struct QpProblem {
  Vec u_des;
  std::vector<ConstraintRow> rows;
  Vec lower;
  Vec upper;

  int dim() const { return static_cast<int>(u_des.size()); }
};

enum class QpStatus { kOptimal, kInfeasible };

std::string to_string(QpStatus status);

struct QpSolution {
  QpStatus status = QpStatus::kInfeasible;
  Vec u;
  // Combined constraint indexing: rows first, then the m lower bounds, then
  // the m upper bounds.
  std::vector<int> active_set;
  // Multipliers for the combined constraints in the convention
  // u - u_des = 1/2 sum_i mu_i a_i.
  Vec multipliers;
  double kkt_residual = 0.0;
  int iterations = 0;
  // When infeasible: nonnegative weights y over the combined constraints with
  // sum_i y_i a_i = 0 and sum_i y_i b_i = certificate_margin > 0.
  Vec certificate;
  double certificate_margin = 0.0;
};

// Dual active-set method; throws SolverStalled after 500 iterations and
// std::invalid_argument for malformed problems. Rows with |a| < 1e-12 are
// dropped when b <= 0 and make the problem infeasible when b > 0.
QpSolution solve_qp(const QpProblem& problem);

// Stationarity, primal feasibility and complementarity residual of u with
// the given combined multipliers.
double kkt_residual(const QpProblem& problem, const Vec& u,
                    const Vec& multipliers);

struct OracleResult {
  bool feasible = false;
  Vec u;
  double resolution = 0.0;  // grid spacing (largest axis)
};

// Exhaustive grid search over the box for m <= 2; throws UnsupportedError
// for larger m.
OracleResult qp_brute_oracle(const QpProblem& problem, int grid_points);

}  // namespace uebcbf

#endif  // UEBCBF_QP_HPP_
