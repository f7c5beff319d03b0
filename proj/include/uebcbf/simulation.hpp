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
#ifndef UEBCBF_SIMULATION_HPP_
#define UEBCBF_SIMULATION_HPP_

#include <string>
#include <vector>

#include "uebcbf/config.hpp"
#include "uebcbf/linalg.hpp"

namespace uebcbf {

struct SimRow {
  double t = 0.0;
  Vec x;
  Vec u;
  std::string mode;  // "qp" or "backup"
  Vec d_true;
  Vec d_hat;
  double e_bar = 0.0;
  double h = 0.0;
  double hb_T = 0.0;
  double min_h_margin = 0.0;
  std::string qp_status;
};

struct SimRecord {
  int n = 0;
  int m = 0;
  std::vector<SimRow> rows;
  // "ok", or "error" when the run was aborted (rows hold the partial run).
  std::string status = "ok";
  std::string message;
  // Replay of every qp-mode step against its own constraint rows.
  double worst_row_violation = 0.0;

  bool ok() const { return status == "ok"; }
};

SimRecord run_simulation(const SimConfig& config);
SimRecord run_simulation(const SimSetup& setup);

// Summary statistics used by comparisons and acceptance checks.
struct RunSummary {
  double min_h = 0.0;
  double min_hb_T = 0.0;
  double saturation_fraction = 0.0;
  int mode_switches = 0;
  double max_abs_speed = 0.0;
  double max_estimate_error = 0.0;  // max of |d - d_hat|
  double max_containment_ratio = 0.0;  // max of |d - d_hat| / e_bar
  bool inputs_in_box = true;
};

RunSummary summarize(const SimRecord& record, const SimSetup& setup);

}  // namespace uebcbf

#endif  // UEBCBF_SIMULATION_HPP_
