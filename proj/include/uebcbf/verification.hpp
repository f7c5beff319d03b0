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
#ifndef UEBCBF_VERIFICATION_HPP_
#define UEBCBF_VERIFICATION_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "uebcbf/config.hpp"
#include "uebcbf/simulation.hpp"

namespace uebcbf {

// splitmix64 finalizer over (seed, stream); each trial owns one stream so
// results do not depend on evaluation order.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream);

// Random multi-sine signal with |d| <= delta_d and |d'| <= delta_v.
class FourierDisturbance {
 public:
  FourierDisturbance(int n, double delta_d, double delta_v,
                     std::mt19937_64& rng, int harmonics = 3);
  Vec operator()(double t) const;
  Vec rate(double t) const;

 private:
  Vec offset_;
  std::vector<Vec> amp_;
  std::vector<double> freq_;
  std::vector<double> phase_;
};

struct BoundKindReport {
  BoundKind kind = BoundKind::kGronwall;
  double rate = 0.0;
  long checks = 0;
  long violations = 0;
  long skipped = 0;  // flows that left the inflated domain
  double max_ratio = 0.0;
};

struct BoundsReport {
  std::vector<BoundKindReport> kinds;  // gronwall, lognorm
  bool lognorm_tighter = true;  // pointwise on the grid, sampled e_bar
  long violations() const;
};

BoundsReport verify_bounds(const SimConfig& config, int trials,
                           std::uint64_t seed, int states_per_trial = 20);

struct SubsetReport {
  long samples = 0;
  long inside_estimated = 0;  // x in the tightened set
  long violations = 0;        // of those, outside the true set
  long skipped = 0;
  // Same samples with kind none; reported, not asserted.
  long none_inside = 0;
  long none_violations = 0;
};

SubsetReport verify_subset(const SimConfig& config, int samples,
                           std::uint64_t seed);

struct SensitivityReport {
  int trials = 0;
  double max_rel_phi = 0.0;
  double max_rel_theta = 0.0;
  long skipped = 0;
};

SensitivityReport verify_sensitivity(const SimConfig& config, int trials,
                                     std::uint64_t seed);

struct EstimatorReport {
  bool run_ok = false;
  double max_containment_ratio = 0.0;
  double max_error = 0.0;
  double late_time = 0.0;   // 7 / lambda_min
  double max_late_error = 0.0;
};

EstimatorReport verify_estimator(const SimConfig& config);

struct ControllerRow {
  std::string controller;
  SimRecord record;
  RunSummary summary;
};

struct Comparison {
  std::vector<ControllerRow> rows;  // ue-bcbf, dr-bcbf, bcbf
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  bool ok() const { return failures.empty(); }
};

Comparison compare_controllers(const SimConfig& config);
std::string format_comparison(const Comparison& c);

}  // namespace uebcbf

#endif  // UEBCBF_VERIFICATION_HPP_
