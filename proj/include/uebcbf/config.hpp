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
#ifndef UEBCBF_CONFIG_HPP_
#define UEBCBF_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "uebcbf/filter.hpp"
#include "uebcbf/systems.hpp"

namespace uebcbf {

// Unset optionals fall back to the scenario's defaults in resolve().
struct SimConfig {
  std::string scenario = "double-integrator";
  std::string controller = "ue-bcbf";
  double omega = 0.2;
  double z_min = 0.5;
  std::optional<double> t_final;
  std::optional<double> control_dt;
  int sim_substeps = 10;
  std::uint64_t seed = 0;

  std::optional<std::string> estimator_kind;
  double lambda = 10.0;  // isotropic gain unless lambda_vec is set
  std::optional<Vec> lambda_vec;
  // "continuous": observer integrated with the plant; "zoh": one RK4 step
  // per control period with x, u frozen.
  std::string discretization = "continuous";

  std::optional<double> flow_horizon;
  std::optional<double> flow_delta;
  int flow_substeps = 4;

  std::optional<std::string> bound_kind;
  std::optional<double> rate_override;
  int rate_samples = 4096;

  double alpha = 5.0;
  double alpha_b = 5.0;
  std::optional<Vec> x0;
  std::string out;

  // Applies one key=value pair; throws ConfigError on unknown keys or bad
  // values.
  void set(const std::string& key, const std::string& value);
};

// Flat key=value text. '#' starts a comment; blank lines are ignored.
SimConfig parse_config_text(const std::string& text, SimConfig base = {});
SimConfig load_config_file(const std::string& path, SimConfig base = {});

struct SimSetup {
  Scenario scenario;
  ControllerKind controller = ControllerKind::kUeBcbf;
  FilterSettings filter;
  double t_final = 0.0;
  double control_dt = 0.0;
  int sim_substeps = 10;
  bool continuous_observer = true;
  Vec x0;
};

// Builds the scenario and all derived filter settings, including the flow
// rate constant (estimated unless overridden). Throws ConfigError.
SimSetup resolve(const SimConfig& config);

}  // namespace uebcbf

#endif  // UEBCBF_CONFIG_HPP_
