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
#include "uebcbf/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "uebcbf/errors.hpp"

namespace uebcbf {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(split_seed(seed, stream));
}

namespace {

Vec gaussian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec sample_box(const Box& box, std::mt19937_64& rng) {
  Vec x(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    x[i] = uniform(rng, box.lower[i], box.upper[i]);
  }
  return x;
}

// Random vector with norm <= radius; every other draw lies on the sphere.
Vec sample_ball(int n, double radius, std::mt19937_64& rng, bool on_sphere) {
  Vec v = gaussian(n, rng);
  const double norm = v.norm();
  if (norm == 0.0) return Vec::Zero(n);
  const double r =
      on_sphere ? radius : radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / n);
  return v * (r / norm);
}

SimConfig with_controller(SimConfig c, const std::string& controller) {
  c.controller = controller;
  c.estimator_kind.reset();
  return c;
}

bool inside_estimated(const BarrierSpec& b, const std::vector<Vec>& phi,
                      const TighteningSchedule* s) {
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double eps = s ? s->eps[k] : 0.0;
    if (b.h(phi[k]) - eps < 0.0) return false;
  }
  return b.h_b(phi.back()) - (s ? s->eps_b : 0.0) >= 0.0;
}

}  // namespace

FourierDisturbance::FourierDisturbance(int n, double delta_d, double delta_v,
                                       std::mt19937_64& rng, int harmonics) {
  offset_ = gaussian(n, rng);
  double mag = offset_.norm();
  double rate_mag = 0.0;
  if (delta_v > 0.0) {
    for (int k = 0; k < harmonics; ++k) {
      amp_.push_back(gaussian(n, rng));
      freq_.push_back(uniform(rng, 0.05, 3.0));
      phase_.push_back(uniform(rng, 0.0, 2.0 * 3.14159265358979323846));
      mag += amp_.back().norm();
      rate_mag += freq_.back() * amp_.back().norm();
    }
  }
  // Triangle-inequality bounds; the scale makes at least one of them tight.
  double scale = mag > 0.0 ? delta_d / mag : 0.0;
  if (rate_mag > 0.0) scale = std::min(scale, delta_v / rate_mag);
  offset_ *= scale;
  for (auto& a : amp_) a *= scale;
}

Vec FourierDisturbance::operator()(double t) const {
  Vec d = offset_;
  for (std::size_t k = 0; k < amp_.size(); ++k) {
    d += amp_[k] * std::sin(freq_[k] * t + phase_[k]);
  }
  return d;
}

Vec FourierDisturbance::rate(double t) const {
  Vec d = Vec::Zero(offset_.size());
  for (std::size_t k = 0; k < amp_.size(); ++k) {
    d += amp_[k] * (freq_[k] * std::cos(freq_[k] * t + phase_[k]));
  }
  return d;
}

long BoundsReport::violations() const {
  long v = 0;
  for (const auto& k : kinds) v += k.violations;
  return v;
}

BoundsReport verify_bounds(const SimConfig& config, int trials,
                           std::uint64_t seed, int states_per_trial) {
  const SimSetup setup = resolve(with_controller(config, "ue-bcbf"));
  const Scenario& sc = setup.scenario;
  const FilterSettings& fs = setup.filter;
  const int n = sc.model.n;
  const FlowGrid& grid = fs.grid;

  BoundsReport report;
  std::vector<BoundParams> params;
  for (BoundKind kind : {BoundKind::kGronwall, BoundKind::kLogNorm}) {
    BoundParams p = fs.bounds;
    p.kind = kind;
    if (kind != fs.bounds.kind || !config.rate_override) {
      p.rate = estimate_rate_constant(sc.model, sc.backup, kind,
                                      config.rate_samples);
    }
    params.push_back(p);
    BoundKindReport r;
    r.kind = kind;
    r.rate = p.rate;
    report.kinds.push_back(r);
  }

  for (int i = 0; i <= 20; ++i) {
    const double e_bar =
        error_bound(fs.error_model, setup.t_final * i / 20.0);
    for (int k = 0; k < grid.count(); ++k) {
      if (delta_max(params[1], e_bar, grid.tau(k)) >
          delta_max(params[0], e_bar, grid.tau(k))) {
        report.lognorm_tighter = false;
      }
    }
  }

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng = trial_rng(seed, trial);
    const FourierDisturbance dist(n, fs.observer.delta_d, fs.observer.delta_v,
                                  rng);
    for (int s = 0; s < states_per_trial; ++s) {
      const Vec x = sample_box(sc.verification_box, rng);
      const double t = uniform(rng, 0.0, setup.t_final);
      const double e_bar = error_bound(fs.error_model, t);
      const Vec d_hat = dist(t) + sample_ball(n, e_bar, rng, s % 2 == 0);
      FlowBundle est;
      std::vector<Vec> truth;
      try {
        est = integrate_flow_bundle(sc.model, sc.backup, x, d_hat, grid,
                                    fs.substeps);
        truth = integrate_state_flow(
            sc.model, sc.backup, x, [&](double tau) { return dist(t + tau); },
            grid, fs.substeps);
      } catch (const FlowEscapeError&) {
        for (auto& r : report.kinds) ++r.skipped;
        continue;
      }
      for (std::size_t b = 0; b < params.size(); ++b) {
        BoundKindReport& r = report.kinds[b];
        for (int k = 0; k < grid.count(); ++k) {
          const double dev = (truth[k] - est.phi[k]).norm();
          const double dm = delta_max(params[b], e_bar, grid.tau(k));
          ++r.checks;
          if (dev > dm * (1.0 + 1e-6)) ++r.violations;
          if (dm > 0.0) r.max_ratio = std::max(r.max_ratio, dev / dm);
        }
      }
    }
  }
  return report;
}

SubsetReport verify_subset(const SimConfig& config, int samples,
                           std::uint64_t seed) {
  const SimSetup setup = resolve(with_controller(config, "ue-bcbf"));
  const Scenario& sc = setup.scenario;
  const FilterSettings& fs = setup.filter;
  const int n = sc.model.n;

  SubsetReport rep;
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng = trial_rng(seed, i);
    const Vec x = sample_box(sc.verification_box, rng);
    const double t = uniform(rng, 0.0, setup.t_final);
    // Half the samples use the scenario's own disturbance.
    const FourierDisturbance random_d(n, sc.truth.delta_d, sc.truth.delta_v,
                                      rng);
    auto d = [&](double s) { return i % 2 == 0 ? sc.truth.d(s) : random_d(s); };
    const double e_bar = error_bound(fs.error_model, t);
    const double e_bar_dot = error_bound_derivative(fs.error_model, t);
    const Vec d_hat = d(t) + sample_ball(n, e_bar, rng, i % 4 < 2);
    ++rep.samples;
    try {
      const FlowBundle est = integrate_flow_bundle(sc.model, sc.backup, x,
                                                   d_hat, fs.grid, fs.substeps);
      const std::vector<Vec> truth = integrate_state_flow(
          sc.model, sc.backup, x, [&](double tau) { return d(t + tau); },
          fs.grid, fs.substeps);
      const NominalFlow nominal =
          integrate_nominal_flow(sc.model, sc.backup, x, fs.grid, fs.substeps);
      const TighteningSchedule sched =
          build_tightening(fs.bounds, e_bar, e_bar_dot, fs.grid);
      const bool in_true = inside_estimated(sc.barriers, truth, nullptr);
      if (inside_estimated(sc.barriers, est.phi, &sched)) {
        ++rep.inside_estimated;
        if (!in_true) ++rep.violations;
      }
      if (inside_estimated(sc.barriers, nominal.phi, nullptr)) {
        ++rep.none_inside;
        if (!in_true) ++rep.none_violations;
      }
    } catch (const FlowEscapeError&) {
      ++rep.skipped;
    }
  }
  return rep;
}

SensitivityReport verify_sensitivity(const SimConfig& config, int trials,
                                     std::uint64_t seed) {
  const SimSetup setup = resolve(with_controller(config, "ue-bcbf"));
  const Scenario& sc = setup.scenario;
  const FilterSettings& fs = setup.filter;
  SensitivityReport rep;
  for (int i = 0; i < trials; ++i) {
    std::mt19937_64 rng = trial_rng(seed, i);
    const Vec x = sample_box(sc.verification_box, rng);
    const Vec d_hat = sample_ball(sc.model.n, sc.truth.delta_d, rng, false);
    try {
      const FlowBundle b = integrate_flow_bundle(sc.model, sc.backup, x, d_hat,
                                                 fs.grid, fs.substeps);
      const SensitivityEstimate fd = finite_difference_flow_sensitivity(
          sc.model, sc.backup, x, d_hat, fs.grid, fs.substeps);
      rep.max_rel_phi = std::max(
          rep.max_rel_phi, (b.Phi.back() - fd.Phi).norm() / fd.Phi.norm());
      rep.max_rel_theta =
          std::max(rep.max_rel_theta, (b.Theta.back() - fd.Theta).norm() /
                                          std::max(fd.Theta.norm(), 1e-300));
      ++rep.trials;
    } catch (const FlowEscapeError&) {
      ++rep.skipped;
    }
  }
  return rep;
}

EstimatorReport verify_estimator(const SimConfig& config) {
  SimConfig c = with_controller(config, "ue-bcbf");
  const SimSetup setup = resolve(c);
  const SimRecord rec = run_simulation(setup);
  const RunSummary sum = summarize(rec, setup);
  EstimatorReport rep;
  rep.run_ok = rec.ok();
  rep.max_containment_ratio = sum.max_containment_ratio;
  rep.max_error = sum.max_estimate_error;
  rep.late_time = 7.0 / setup.filter.observer.lambda_min();
  for (const auto& r : rec.rows) {
    if (r.t >= rep.late_time) {
      rep.max_late_error =
          std::max(rep.max_late_error, (r.d_true - r.d_hat).norm());
    }
  }
  return rep;
}

Comparison compare_controllers(const SimConfig& config) {
  Comparison out;
  for (const char* name : {"ue-bcbf", "dr-bcbf", "bcbf"}) {
    const SimSetup setup = resolve(with_controller(config, name));
    ControllerRow row;
    row.controller = name;
    row.record = run_simulation(setup);
    row.summary = summarize(row.record, setup);
    if (!row.record.ok()) {
      // A baseline that drives the state out of the model domain is a
      // finding about the baseline, not a harness failure.
      auto& sink = row.controller == "ue-bcbf" ? out.failures : out.notes;
      sink.push_back(std::string(name) + " run aborted at t=" +
                     std::to_string(row.record.rows.empty()
                                        ? 0.0
                                        : row.record.rows.back().t) +
                     ": " + row.record.message);
    }
    if (!row.summary.inputs_in_box) {
      out.failures.push_back(std::string(name) + " input left the box");
    }
    out.rows.push_back(std::move(row));
  }
  const RunSummary& ue = out.rows[0].summary;
  const RunSummary& dr = out.rows[1].summary;
  const RunSummary& nom = out.rows[2].summary;
  if (ue.min_h < 0.0) out.failures.push_back("ue-bcbf min h < 0");
  if (config.scenario == "double-integrator" && config.omega == 0.2) {
    if (!(nom.min_h < 0.0)) out.failures.push_back("bcbf min h >= 0");
    if (ue.max_abs_speed < dr.max_abs_speed) {
      out.failures.push_back("ue-bcbf max speed below dr-bcbf");
    }
  }
  return out;
}

std::string format_comparison(const Comparison& c) {
  std::string out =
      "controller      min_h        min_hb_T     sat_frac  switches  "
      "max_speed\n";
  char buf[160];
  for (const auto& r : c.rows) {
    const std::string label =
        r.controller == "dr-bcbf" ? "dr-bcbf-style" : r.controller;
    std::snprintf(buf, sizeof buf, "%-15s %-12.5g %-12.5g %-9.4f %-9d %.5g\n",
                  label.c_str(), r.summary.min_h, r.summary.min_hb_T,
                  r.summary.saturation_fraction, r.summary.mode_switches,
                  r.summary.max_abs_speed);
    out += buf;
  }
  for (const auto& n : c.notes) out += "note: " + n + "\n";
  for (const auto& f : c.failures) out += "FAIL: " + f + "\n";
  return out;
}

}  // namespace uebcbf
