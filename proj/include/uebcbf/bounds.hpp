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
#ifndef UEBCBF_BOUNDS_HPP_
#define UEBCBF_BOUNDS_HPP_

#include <string>
#include <vector>

#include "uebcbf/flow.hpp"
#include "uebcbf/linalg.hpp"
#include "uebcbf/systems.hpp"

namespace uebcbf {

enum class BoundKind { kGronwall, kLogNorm };

std::string to_string(BoundKind kind);
BoundKind parse_bound_kind(const std::string& s);

// rate is the Lipschitz constant of f_cl (gronwall, > 0) or an upper bound c
// on the logarithmic norm of J_cl (lognorm, any sign).
struct BoundParams {
  BoundKind kind = BoundKind::kGronwall;
  double rate = 1.0;
  double delta_v = 0.0;
  double lipschitz_h = 1.0;
  double lipschitz_hb = 1.0;

  void validate() const;
};

// |d(t + tau) - d_hat(t)| <= delta_v tau + e_bar.
double deviation_bound(double delta_v, double e_bar, double tau);

// Bound on |phi^d(tau, x) - phi^dhat(tau, x)|:
//   (delta_v / r^2 + e_bar / r)(exp(r tau) - 1) - (delta_v / r) tau.
// Evaluated in the algebraically equivalent form
//   e_bar tau E1(r tau) + delta_v tau^2 E2(r tau)
// with E1(z) = (e^z - 1)/z and E2(z) = (e^z - 1 - z)/z^2, which is exact at
// r = 0 and free of cancellation for small |r|.
double delta_max(const BoundParams& params, double e_bar, double tau);

// d/dt of delta_max: only e_bar depends on global time.
double delta_max_time_derivative(const BoundParams& params, double e_bar_dot,
                                 double tau);

// Largest eigenvalue of (A + A^T) / 2. Throws NumericalError on non-finite A.
double log_norm_2(const Mat& a);
double spectral_norm(const Mat& a);

// Sampled upper bound on mu_2(J_cl) (lognorm) or |J_cl|_2 (gronwall) over
// the state domain, using a Halton sequence, with a 5% margin.
double estimate_rate_constant(const SystemModel& model,
                              const BackupPolicy& policy, BoundKind kind,
                              int sample_count);

struct TighteningSchedule {
  std::vector<double> eps;      // per grid node
  std::vector<double> deps_dt;  // per grid node
  double eps_b = 0.0;
  double deps_b_dt = 0.0;
};

// eps_k = L_h delta_max(tau_k, t) and eps_b = L_hb delta_max(T, t), with the
// matching time derivatives.
TighteningSchedule build_tightening(const BoundParams& params, double e_bar,
                                    double e_bar_dot, const FlowGrid& grid);

// Radical-inverse Halton point in [0,1)^dim; index starts at 1.
Vec halton_point(long index, int dim);

}  // namespace uebcbf

#endif  // UEBCBF_BOUNDS_HPP_
