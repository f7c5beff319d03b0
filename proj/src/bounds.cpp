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
#include "uebcbf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>

#include "uebcbf/errors.hpp"

namespace uebcbf {

std::string to_string(BoundKind kind) {
  return kind == BoundKind::kGronwall ? "gronwall" : "lognorm";
}

BoundKind parse_bound_kind(const std::string& s) {
  if (s == "gronwall") return BoundKind::kGronwall;
  if (s == "lognorm") return BoundKind::kLogNorm;
  throw ConfigError("unknown bound kind: " + s);
}

void BoundParams::validate() const {
  if (kind == BoundKind::kGronwall && !(rate > 0.0)) {
    throw std::invalid_argument("gronwall rate must be > 0");
  }
  if (!std::isfinite(rate)) throw std::invalid_argument("rate must be finite");
  if (delta_v < 0.0) throw std::invalid_argument("delta_v must be >= 0");
}

namespace {

// (e^z - 1) / z
double expm1_ratio(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

// (e^z - 1 - z) / z^2
double expm1_second_ratio(double z) {
  if (std::abs(z) < 1e-3) {
    return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
  }
  return (std::expm1(z) - z) / (z * z);
}

void require_tau(double tau, const char* where) {
  if (tau < 0.0) throw DomainError(std::string(where) + ": tau must be >= 0");
}

}  // namespace

double deviation_bound(double delta_v, double e_bar, double tau) {
  require_tau(tau, "deviation_bound");
  if (e_bar < 0.0) throw DomainError("deviation_bound: e_bar must be >= 0");
  return delta_v * tau + e_bar;
}

double delta_max(const BoundParams& params, double e_bar, double tau) {
  require_tau(tau, "delta_max");
  const double z = params.rate * tau;
  return e_bar * tau * expm1_ratio(z) +
         params.delta_v * tau * tau * expm1_second_ratio(z);
}

double delta_max_time_derivative(const BoundParams& params, double e_bar_dot,
                                 double tau) {
  require_tau(tau, "delta_max_time_derivative");
  return e_bar_dot * tau * expm1_ratio(params.rate * tau);
}

double log_norm_2(const Mat& a) {
  if (!a.allFinite()) throw NumericalError("log_norm_2: non-finite matrix");
  if (a.rows() != a.cols()) throw std::invalid_argument("log_norm_2: square");
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double spectral_norm(const Mat& a) {
  if (!a.allFinite()) throw NumericalError("spectral_norm: non-finite matrix");
  Eigen::SelfAdjointEigenSolver<Mat> solver(a.transpose() * a,
                                            Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

Vec halton_point(long index, int dim) {
  static constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                    23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > static_cast<int>(std::size(kPrimes))) {
    throw std::invalid_argument("halton_point: dimension too large");
  }
  Vec p(dim);
  for (int d = 0; d < dim; ++d) {
    const int base = kPrimes[d];
    double f = 1.0, r = 0.0;
    long i = index;
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    p[d] = r;
  }
  return p;
}

double estimate_rate_constant(const SystemModel& model,
                              const BackupPolicy& policy, BoundKind kind,
                              int sample_count) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  const Box& box = model.state_domain;
  const Vec span = box.upper - box.lower;
  double worst = -std::numeric_limits<double>::infinity();
  auto measure = [&](const Vec& x) {
    const Mat jac = closed_loop_jacobian(model, policy, x);
    return kind == BoundKind::kLogNorm ? log_norm_2(jac) : spectral_norm(jac);
  };
  // The lower and upper corners are always sampled.
  worst = std::max(measure(box.lower), measure(box.upper));
  for (long i = 1; i <= sample_count; ++i) {
    const Vec u = halton_point(i, model.n);
    worst = std::max(worst, measure(Vec(box.lower + span.cwiseProduct(u))));
  }
  return worst + 0.05 * std::abs(worst);
}

TighteningSchedule build_tightening(const BoundParams& params, double e_bar,
                                    double e_bar_dot, const FlowGrid& grid) {
  TighteningSchedule s;
  s.eps.resize(grid.count());
  s.deps_dt.resize(grid.count());
  for (int k = 0; k < grid.count(); ++k) {
    const double tau = grid.tau(k);
    s.eps[k] = params.lipschitz_h * delta_max(params, e_bar, tau);
    s.deps_dt[k] =
        params.lipschitz_h * delta_max_time_derivative(params, e_bar_dot, tau);
  }
  const double horizon = grid.horizon();
  s.eps_b = params.lipschitz_hb * delta_max(params, e_bar, horizon);
  s.deps_b_dt = params.lipschitz_hb *
                delta_max_time_derivative(params, e_bar_dot, horizon);
  return s;
}

}  // namespace uebcbf
