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
// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uebcbf/bounds.hpp"
#include "uebcbf/config.hpp"
#include "uebcbf/errors.hpp"
#include "uebcbf/filter.hpp"
#include "uebcbf/flow.hpp"
#include "uebcbf/qp.hpp"
#include "uebcbf/record_io.hpp"
#include "uebcbf/simulation.hpp"
#include "uebcbf/verification.hpp"

using namespace uebcbf;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

SimConfig di(const std::string& ctrl, double omega) {
  SimConfig c;
  c.scenario = "double-integrator";
  c.controller = ctrl;
  c.omega = omega;
  return c;
}

SimConfig quad(const std::string& ctrl) {
  SimConfig c;
  c.scenario = "quadrotor";
  c.controller = ctrl;
  return c;
}

double min_h(const SimRecord& r) {
  double v = INFINITY;
  for (const auto& row : r.rows) v = std::min(v, row.h);
  return v;
}

double max_abs(const SimRecord& r, int i) {
  double v = 0.0;
  for (const auto& row : r.rows) v = std::max(v, std::abs(row.x[i]));
  return v;
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- 1-3 ---------------------------------------------------------------

void safety_and_baselines() {
  std::ostringstream d1;
  bool ok1 = true;
  for (double omega : {0.0, 0.2}) {
    const SimRecord r = run_simulation(di("ue-bcbf", omega));
    const double v = r.ok() ? min_h(r) : -INFINITY;
    ok1 = ok1 && r.ok() && r.rows.back().t >= 12.0 - 1e-9 && v >= 0.0;
    d1 << "omega=" << omega << " min h=" << fmt("%.3e", v) << (r.ok() ? " " : " (aborted) ");
  }
  report(1, "safety double integrator", ok1, d1.str());

  std::ostringstream d2;
  bool ok2 = true;
  for (double omega : {0.0, 0.2}) {
    const SimRecord r = run_simulation(di("bcbf", omega));
    const double v = min_h(r);
    ok2 = ok2 && r.ok() && v < 0.0;
    d2 << "omega=" << omega << " min h=" << fmt("%.3e", v) << " ";
  }
  report(2, "bcbf baseline violates", ok2, d2.str());

  const SimRecord ue = run_simulation(di("ue-bcbf", 0.2));
  const SimRecord dr = run_simulation(di("dr-bcbf", 0.2));
  const double vu = max_abs(ue, 1), vd = max_abs(dr, 1);
  report(3, "conservatism ordering", ue.ok() && dr.ok() && vu >= vd,
         "max|x2| ue=" + fmt("%.4f", vu) + " dr=" + fmt("%.4f", vd));
}

// ---- 4 -----------------------------------------------------------------

void containment() {
  std::vector<SimConfig> runs;
  for (double omega : {0.0, 0.2}) {
    runs.push_back(di("ue-bcbf", omega));
    runs.push_back(di("dr-bcbf", omega));
  }
  runs.push_back(quad("ue-bcbf"));
  runs.push_back(quad("dr-bcbf"));

  bool ok = true;
  std::ostringstream d;
  for (const SimConfig& c : runs) {
    const SimRecord r = run_simulation(c);
    long bad = 0;
    double first_bad = -1.0, worst = 0.0;
    for (const auto& row : r.rows) {
      const double e = (row.d_true - row.d_hat).norm();
      worst = std::max(worst, row.e_bar > 0.0 ? e / row.e_bar : (e > 0.0 ? INFINITY : 0.0));
      if (e > row.e_bar * (1.0 + 1e-6)) {
        if (bad == 0) first_bad = row.t;
        ++bad;
      }
    }
    if (bad > 0) {
      ok = false;
      d << c.scenario << "/" << c.controller << "/omega=" << c.omega
        << ": " << bad << " steps over, first t=" << first_bad
        << " max ratio=" << fmt("%.3g", worst) << "; ";
    }
  }
  SimConfig c0 = di("ue-bcbf", 0.0);
  const EstimatorReport est = verify_estimator(c0);
  const bool late_ok = est.run_ok && est.max_late_error <= 1e-3;
  ok = ok && late_ok;
  d << "omega=0 error after t=" << est.late_time << ": "
    << fmt("%.3e", est.max_late_error);
  report(4, "observer containment", ok, d.str());
}

// ---- 5-7 ---------------------------------------------------------------

void bounds_and_subset() {
  bool ok5 = true, ok6 = true;
  std::ostringstream d5, d6;
  for (const char* name : {"double-integrator", "quadrotor"}) {
    SimConfig c;
    c.scenario = name;
    const BoundsReport b = verify_bounds(c, 200, 2024);
    // pointwise on the default grid over a spread of error levels
    bool tighter = b.lognorm_tighter;
    SimConfig cg = c, cl = c;
    cg.bound_kind = "gronwall";
    cl.bound_kind = "lognorm";
    const SimSetup sg = resolve(cg), sl = resolve(cl);
    for (double e : {0.0, 1e-4, 1e-2, 0.1, 1.0}) {
      for (double tau : sg.filter.grid.taus()) {
        tighter = tighter && delta_max(sl.filter.bounds, e, tau) <=
                                 delta_max(sg.filter.bounds, e, tau);
      }
    }
    long checks = 0;
    for (const auto& k : b.kinds) checks += k.checks;
    ok5 = ok5 && b.violations() == 0 && tighter && checks > 0;
    d5 << name << ": " << checks << " checks, " << b.violations()
       << " violations, lognorm<=gronwall " << (tighter ? "yes" : "no") << "; ";

    const SubsetReport s = verify_subset(c, 500, 2024);
    ok6 = ok6 && s.violations == 0 && s.inside_estimated > 0;
    d6 << name << ": " << s.inside_estimated << "/" << s.samples
       << " inside, " << s.violations << " violations; ";
  }
  report(5, "flow deviation bounds", ok5, d5.str());
  report(6, "tightened set implication", ok6, d6.str());
}

void sensitivities() {
  bool ok = true;
  std::ostringstream d;
  for (const char* name : {"double-integrator", "quadrotor"}) {
    SimConfig c;
    c.scenario = name;
    const SensitivityReport r = verify_sensitivity(c, 20, 2024);
    const bool pass = r.trials - r.skipped >= 20 && r.max_rel_phi <= 1e-4 &&
                      r.max_rel_theta <= 1e-4;
    ok = ok && pass;
    d << name << ": Phi " << fmt("%.2e", r.max_rel_phi) << " Theta "
      << fmt("%.2e", r.max_rel_theta) << "; ";
  }

  // closed forms for the braking backup on the double integrator
  const Scenario s = make_double_integrator(0.2);
  const FlowGrid g(2.0, 0.1);
  const double T = g.horizon();
  const Mat Phi{{1.0, T}, {0.0, 1.0}};
  const Mat Theta{{T, T * T / 2.0}, {0.0, T}};
  std::mt19937_64 rng(split_seed(2024, 7));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  int used = 0;
  for (int i = 0; i < 20; ++i) {
    const Box& box = s.verification_box;
    Vec x(2);
    for (int j = 0; j < 2; ++j) x[j] = box.lower[j] + u01(rng) * (box.upper[j] - box.lower[j]);
    try {
      const FlowBundle b = integrate_flow_bundle(s.model, s.backup, x, Vec::Zero(2), g, 4);
      worst = std::max({worst, (b.Phi.back() - Phi).cwiseAbs().maxCoeff(),
                        (b.Theta.back() - Theta).cwiseAbs().maxCoeff()});
      ++used;
    } catch (const DomainError&) {
    } catch (const FlowEscapeError&) {
    }
  }
  ok = ok && used >= 10 && worst <= 1e-9;
  d << "closed form max err " << fmt("%.2e", worst) << " (" << used << " states)";
  report(7, "sensitivity matrices", ok, d.str());
}

// ---- 8 -----------------------------------------------------------------

ConstraintRow make_row(const RowVec& a, double b) {
  ConstraintRow r;
  r.a = a;
  r.b = b;
  return r;
}

QpProblem box_problem(const Vec& u_des) {
  return QpProblem{u_des, {}, Vec::Constant(u_des.size(), -1.0),
                   Vec::Constant(u_des.size(), 1.0)};
}

void qp_checks() {
  std::mt19937_64 rng(split_seed(2024, 8));
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> uc(-0.4, 0.4), ud(-2.0, 2.0), uo(0.3, 1.0);
  double worst_kkt = 0.0, worst_gap = 0.0, worst_point = 0.0;
  long optimal = 0, non_optimal = 0, oracle_miss = 0;

  auto check_opt = [&](const QpProblem& p) -> const QpSolution {
    const QpSolution s = solve_qp(p);
    if (s.status == QpStatus::kOptimal) {
      ++optimal;
      worst_kkt = std::max(worst_kkt, s.kkt_residual);
    }
    return s;
  };

  for (int i = 0; i < 200; ++i) {
    const int m = 1 + i % 2;
    Vec center(m), u_des(m);
    for (int j = 0; j < m; ++j) {
      center[j] = uc(rng);
      u_des[j] = ud(rng);
    }
    QpProblem p = box_problem(u_des);
    const int count = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int k = 0; k < count; ++k) {
      RowVec a(m);
      for (int j = 0; j < m; ++j) a[j] = nd(rng);
      a /= a.norm();
      p.rows.push_back(make_row(2.0 * a, 2.0 * (a.dot(center) - uo(rng))));
    }
    const QpSolution s = check_opt(p);
    const OracleResult o = qp_brute_oracle(p, m == 1 ? 20001 : 1001);
    if (s.status != QpStatus::kOptimal || !o.feasible) {
      ++non_optimal;
      continue;
    }
    // Equivalence is on the optimal value: a grid minimizer can sit
    // O(sqrt(resolution)) away from the true one along an active face.
    const double ds = (s.u - p.u_des).norm();
    const double dor = (o.u - p.u_des).norm();
    worst_gap = std::max(worst_gap, (dor - ds) / o.resolution);
    worst_point = std::max(worst_point, (s.u - o.u).norm() / o.resolution);
    if (ds > dor + 1e-12 || dor - ds > 2.0 * o.resolution) ++oracle_miss;
  }

  long reported = 0;
  for (int i = 0; i < 50; ++i) {
    const int m = 1 + i % 2;
    QpProblem p = box_problem(Vec::Constant(m, nd(rng)));
    RowVec a(m);
    for (int j = 0; j < m; ++j) a[j] = nd(rng);
    if (i % 2 == 0) {
      p.rows.push_back(make_row(a, 0.2));
      p.rows.push_back(make_row(-a, 0.1));
    } else {
      p.rows.push_back(make_row(a, a.cwiseAbs().sum() * 1.05));
    }
    p.rows.push_back(make_row(RowVec::Constant(m, 1.0), -10.0));
    const QpSolution s = solve_qp(p);
    if (s.status == QpStatus::kInfeasible && s.certificate_margin > 0.0) ++reported;
  }

  // Every optimal solve inside actual filter runs, replayed from the records.
  for (const SimConfig& c : {di("ue-bcbf", 0.2), quad("ue-bcbf")}) {
    const SimSetup setup = resolve(c);
    const SimRecord r = run_simulation(setup);
    for (std::size_t k = 0; k < r.rows.size(); k += 5) {
      const SimRow& row = r.rows[k];
      try {
        const SafeStep st = safe_controller_step(setup.scenario, setup.filter,
                                                 row.x, row.t, row.d_hat);
        check_opt(QpProblem{setup.scenario.primary(row.x), st.rows,
                            setup.scenario.model.input_lower,
                            setup.scenario.model.input_upper});
      } catch (const DomainError&) {
      } catch (const FlowEscapeError&) {
      } catch (const SolverStalled&) {
        ++non_optimal;
      }
    }
  }

  const bool ok = worst_kkt <= 1e-7 && non_optimal == 0 && oracle_miss == 0 &&
                  reported == 50;
  std::ostringstream d;
  d << optimal << " optimal solves, max KKT " << fmt("%.2e", worst_kkt)
    << "; oracle value gap " << fmt("%.2f", worst_gap) << " grid steps (point "
    << fmt("%.1f", worst_point) << "), "
    << oracle_miss << " misses; " << reported << "/50 infeasible reported";
  report(8, "QP correctness", ok, d.str());
}

// ---- 9-10 --------------------------------------------------------------

void quadrotor_run() {
  const QuadrotorParams qp;
  const Scenario s = make_planar_quadrotor(qp);
  const bool footnote = qp.f_max == 20.0 && qp.m_max == 20.0 && qp.k_p == 1.0 &&
                        qp.k_d == 1.01 && qp.kappa == 5.0 &&
                        std::abs(qp.theta_max - 55.0 * M_PI / 180.0) < 1e-15 &&
                        qp.theta_dot_max == 3.0 &&
                        check_quadrotor_backup(qp, s.truth.delta_d).all();
  const SimSetup setup = resolve(quad("ue-bcbf"));
  const SimRecord r = run_simulation(setup);
  double zmin = INFINITY, fmin = INFINITY, fmax = -INFINITY, mabs = 0.0;
  for (const auto& row : r.rows) {
    zmin = std::min(zmin, row.x[1]);
    fmin = std::min(fmin, row.u[0]);
    fmax = std::max(fmax, row.u[0]);
    mabs = std::max(mabs, std::abs(row.u[1]));
  }
  const bool ok = footnote && r.ok() && r.rows.back().t >= 10.0 - 1e-9 &&
                  zmin >= qp.z_min && fmin >= 0.0 && fmax <= 20.0 && mabs <= 20.0;
  std::ostringstream d;
  d << "min z=" << fmt("%.4f", zmin) << " F in [" << fmt("%.3f", fmin) << ", "
    << fmt("%.3f", fmax) << "] max|M|=" << fmt("%.3f", mabs)
    << (footnote ? "" : " (parameter mismatch)");
  report(9, "quadrotor run", ok, d.str());
}

void determinism() {
  bool ok = true;
  std::ostringstream d;
  for (const SimConfig& c : {di("ue-bcbf", 0.2), di("dr-bcbf", 0.0), quad("ue-bcbf")}) {
    const std::string a = to_csv(run_simulation(c));
    const std::string b = to_csv(run_simulation(c));
    ok = ok && a == b && !a.empty();
    d << c.scenario << "/" << c.controller << " " << (a == b ? "same" : "differs")
      << "; ";
  }
  report(10, "determinism", ok, d.str());
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  safety_and_baselines();
  containment();
  bounds_and_subset();
  sensitivities();
  qp_checks();
  quadrotor_run();
  determinism();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 10 criteria failed (%.1f s)\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
