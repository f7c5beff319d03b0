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
#include "uebcbf/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "uebcbf/errors.hpp"

namespace uebcbf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
  return out;
}

// Comma-separated list.
Vec to_vec(const std::string& key, const std::string& v) {
  std::vector<double> vals;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(to_double(key, trim(item)));
  if (vals.empty()) throw ConfigError("empty list for " + key);
  return Eigen::Map<Vec>(vals.data(), static_cast<int>(vals.size()));
}

}  // namespace

void SimConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "scenario") {
    scenario = v;
  } else if (key == "controller" || key == "filter.controller") {
    controller = v;
  } else if (key == "omega") {
    omega = to_double(key, v);
  } else if (key == "scenario.z_min") {
    z_min = to_double(key, v);
  } else if (key == "scenario.x0") {
    x0 = to_vec(key, v);
  } else if (key == "t_final") {
    t_final = to_double(key, v);
  } else if (key == "control_dt") {
    control_dt = to_double(key, v);
  } else if (key == "sim_substeps") {
    sim_substeps = to_int(key, v);
  } else if (key == "seed") {
    std::uint64_t s = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), s);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw ConfigError("bad seed '" + v + "'");
    }
    seed = s;
  } else if (key == "estimator.kind") {
    parse_estimator_kind(v);
    estimator_kind = v;
  } else if (key == "estimator.lambda") {
    const Vec l = to_vec(key, v);
    if (l.size() == 1) {
      lambda = l[0];
      lambda_vec.reset();
    } else {
      lambda_vec = l;
    }
  } else if (key == "estimator.discretization") {
    if (v != "continuous" && v != "zoh") {
      throw ConfigError("estimator.discretization must be continuous or zoh");
    }
    discretization = v;
  } else if (key == "flow.horizon") {
    flow_horizon = to_double(key, v);
  } else if (key == "flow.delta") {
    flow_delta = to_double(key, v);
  } else if (key == "flow.substeps") {
    flow_substeps = to_int(key, v);
  } else if (key == "bounds.kind") {
    parse_bound_kind(v);
    bound_kind = v;
  } else if (key == "bounds.rate_override") {
    rate_override = to_double(key, v);
  } else if (key == "bounds.rate_samples") {
    rate_samples = to_int(key, v);
  } else if (key == "filter.alpha") {
    alpha = to_double(key, v);
  } else if (key == "filter.alpha_b") {
    alpha_b = to_double(key, v);
  } else if (key == "out") {
    out = v;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

SimConfig parse_config_text(const std::string& text, SimConfig base) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

SimConfig load_config_file(const std::string& path, SimConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

SimSetup resolve(const SimConfig& c) {
  SimSetup s;
  if (c.omega < 0.0) throw ConfigError("omega must be >= 0");
  s.scenario = make_scenario(c.scenario, c.omega, c.z_min);
  const Scenario& sc = s.scenario;
  const int n = sc.model.n;

  s.controller = parse_controller_kind(c.controller);
  s.t_final = c.t_final.value_or(sc.t_final);
  s.control_dt = c.control_dt.value_or(sc.control_dt);
  if (!(s.t_final > 0.0)) throw ConfigError("t_final must be > 0");
  if (!(s.control_dt > 0.0)) throw ConfigError("control_dt must be > 0");
  if (c.sim_substeps < 1) throw ConfigError("sim_substeps must be >= 1");
  if (c.flow_substeps < 1) throw ConfigError("flow.substeps must be >= 1");
  s.sim_substeps = c.sim_substeps;
  s.continuous_observer = c.discretization == "continuous";
  s.x0 = c.x0.value_or(sc.x0);
  if (s.x0.size() != n) throw ConfigError("scenario.x0 has wrong dimension");

  FilterSettings& f = s.filter;
  f.kind = c.estimator_kind ? parse_estimator_kind(*c.estimator_kind)
                            : default_estimator(s.controller);
  f.observer.lambda = c.lambda_vec.value_or(Vec::Constant(n, c.lambda));
  if (f.observer.lambda.size() != n) {
    throw ConfigError("estimator.lambda has wrong dimension");
  }
  f.observer.delta_d = sc.truth.delta_d;
  f.observer.delta_v = sc.truth.delta_v;
  try {
    f.observer.validate();
    f.alpha = ClassKappa(c.alpha);
    f.alpha_b = ClassKappa(c.alpha_b);
    f.grid = FlowGrid(c.flow_horizon.value_or(sc.flow_horizon),
                      c.flow_delta.value_or(sc.flow_delta));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  f.error_model = make_error_bound_model(f.kind, f.observer);
  f.substeps = c.flow_substeps;

  f.bounds.kind = parse_bound_kind(c.bound_kind.value_or(sc.bound_kind));
  f.bounds.rate = c.rate_override
                      ? *c.rate_override
                      : estimate_rate_constant(sc.model, sc.backup,
                                               f.bounds.kind, c.rate_samples);
  // With d_hat frozen at 0 the gap |d(t + tau) - d_hat| never exceeds
  // delta_d, so the drift term of the deviation bound is not needed.
  f.bounds.delta_v =
      f.kind == EstimatorKind::kObserver ? sc.truth.delta_v : 0.0;
  f.bounds.lipschitz_h = sc.barriers.lipschitz_h;
  f.bounds.lipschitz_hb = sc.barriers.lipschitz_hb;
  try {
    f.bounds.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

}  // namespace uebcbf
