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
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "uebcbf/config.hpp"
#include "uebcbf/errors.hpp"
#include "uebcbf/record_io.hpp"
#include "uebcbf/simulation.hpp"
#include "uebcbf/verification.hpp"

using namespace uebcbf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "uebcbf_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UEBCBF_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

SimConfig short_run(const std::string& scenario, const std::string& ctrl) {
  SimConfig c;
  c.scenario = scenario;
  c.controller = ctrl;
  c.t_final = 2.0;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const SimConfig c = parse_config_text(
      "# comment line\n"
      "scenario = quadrotor\n"
      "controller=dr-bcbf   # trailing comment\n"
      "\n"
      "flow.horizon = 0.1\n"
      "flow.delta = 0.01\n"
      "estimator.lambda = 4, 5, 6, 7, 8, 9\n"
      "scenario.x0 = 0, 2, 0, 0, 0, 0\n"
      "seed = 18446744073709551615\n");
  CHECK(c.scenario == "quadrotor");
  CHECK(c.controller == "dr-bcbf");
  CHECK(*c.flow_horizon == 0.1);
  REQUIRE(c.lambda_vec);
  CHECK(c.lambda_vec->size() == 6);
  CHECK((*c.lambda_vec)[5] == 9.0);
  CHECK(c.seed == 18446744073709551615ULL);
  const SimSetup s = resolve(c);
  CHECK(s.filter.kind == EstimatorKind::kWorstCase);
  CHECK(s.filter.grid.count() == 11);
  CHECK(s.x0[1] == 2.0);
  CHECK(s.filter.observer.lambda_min() == 4.0);

  CHECK_THROWS_AS(parse_config_text("bogus.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("filter.alpha = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("bounds.kind = l1\n"), ConfigError);
  CHECK_THROWS_AS(resolve(parse_config_text("flow.delta = 0.3\n")), ConfigError);
  CHECK_THROWS_AS(resolve(parse_config_text("scenario = cartpole\n")), ConfigError);
  CHECK_THROWS_AS(resolve(parse_config_text("t_final = 0\n")), ConfigError);
  CHECK_THROWS_AS(resolve(parse_config_text("scenario.x0 = 1, 2, 3\n")), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/cfg.txt"), IoError);
}

TEST_CASE("resolved defaults") {
  const SimSetup di = resolve(SimConfig{});
  CHECK(di.t_final == 12.0);
  CHECK(di.control_dt == 0.01);
  CHECK(di.filter.grid.horizon() == 2.0);
  CHECK(di.filter.grid.step() == 0.1);
  CHECK(di.filter.bounds.kind == BoundKind::kGronwall);
  CHECK(di.filter.bounds.rate == doctest::Approx(1.05).epsilon(1e-14));
  CHECK(di.filter.alpha.slope == 5.0);
  CHECK(di.filter.observer.lambda == Vec::Constant(2, 10.0));
  SimConfig q;
  q.scenario = "quadrotor";
  const SimSetup qs = resolve(q);
  CHECK(qs.t_final == 10.0);
  CHECK(qs.filter.bounds.kind == BoundKind::kLogNorm);
  CHECK(qs.x0 == Vec{{0.0, 3.0, 0.0, 0.0, 0.0, 0.0}});
}

TEST_CASE("simulation record shape and invariants") {
  const SimSetup s = resolve(short_run("double-integrator", "ue-bcbf"));
  const SimRecord rec = run_simulation(s);
  REQUIRE(rec.ok());
  CHECK(rec.rows.size() == 201);
  for (std::size_t k = 1; k < rec.rows.size(); ++k) {
    CHECK(rec.rows[k].t > rec.rows[k - 1].t);
  }
  for (const auto& r : rec.rows) {
    CHECK(r.x.allFinite());
    CHECK(std::isfinite(r.hb_T));
    CHECK(std::isfinite(r.min_h_margin));
    CHECK(s.scenario.model.input_admissible(r.u));
    CHECK((r.d_true - r.d_hat).norm() <= r.e_bar * (1.0 + 1e-6));
  }
  CHECK(rec.worst_row_violation <= 1e-8);
  // starts at rest far from the wall: the primary command goes through
  CHECK(rec.rows[0].mode == "qp");
  CHECK(rec.rows[0].u[0] == 1.0);
}

TEST_CASE("deviation bound holds along closed-loop runs") {
  for (const char* name : {"double-integrator", "quadrotor"}) {
    const SimSetup s = resolve(short_run(name, "ue-bcbf"));
    const SimRecord rec = run_simulation(s);
    REQUIRE(rec.ok());
    const double dv = s.scenario.truth.delta_v;
    for (std::size_t k = 0; k < rec.rows.size(); k += 10) {
      const SimRow& r = rec.rows[k];
      for (double tau = 0.0; tau <= 3.0; tau += 0.1) {
        const double gap = (s.scenario.truth.d(r.t + tau) - r.d_hat).norm();
        CHECK(gap <= deviation_bound(dv, r.e_bar, tau) * (1.0 + 1e-6));
      }
    }
  }
}

TEST_CASE("joint observer integration has no hold bias") {
  // Zero true disturbance: the estimate must stay at zero up to roundoff.
  SimSetup s = resolve(short_run("double-integrator", "ue-bcbf"));
  s.scenario.truth.d = [](double) { return Vec::Zero(2); };
  s.scenario.truth.d_dot = [](double) { return Vec::Zero(2); };
  const SimRecord rec = run_simulation(s);
  REQUIRE(rec.ok());
  double worst = 0.0;
  for (const auto& r : rec.rows) worst = std::max(worst, r.d_hat.norm());
  CHECK(worst <= 1e-12);
}

TEST_CASE("error decays monotonically for a constant disturbance") {
  SimConfig c = short_run("double-integrator", "ue-bcbf");
  c.omega = 0.0;
  const SimRecord rec = run_simulation(c);
  REQUIRE(rec.ok());
  double prev = (rec.rows[1].d_true - rec.rows[1].d_hat).norm();
  for (std::size_t k = 2; k < rec.rows.size(); ++k) {
    const double e = (rec.rows[k].d_true - rec.rows[k].d_hat).norm();
    CHECK(e <= prev + 1e-15);
    prev = e;
    if (rec.rows[k].t >= 0.7) CHECK(e <= 1e-3);
  }
}

TEST_CASE("aborted runs keep the partial record") {
  SimConfig c = short_run("double-integrator", "ue-bcbf");
  c.x0 = Vec{{4.9, 4.9}};  // backup flow leaves the inflated domain
  const SimRecord rec = run_simulation(c);
  CHECK_FALSE(rec.ok());
  CHECK(rec.status == "error");
  CHECK(rec.rows.empty());
  CHECK_FALSE(rec.message.empty());
}

TEST_CASE("csv format and round trip") {
  const SimRecord rec =
      run_simulation(short_run("quadrotor", "ue-bcbf"));
  REQUIRE(rec.ok());
  CHECK(csv_header(2, 1) ==
        "t,x0,x1,u0,mode,d0,d1,dhat0,dhat1,ebar,h,hb_T,min_h_margin,qp_status");
  const fs::path p = scratch("round_trip.csv");
  write_csv(rec, p.string());
  const std::string text = slurp(p);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.substr(0, text.find('\n')) == csv_header(6, 2));
  const SimRecord back = read_csv(p.string());
  REQUIRE(back.rows.size() == rec.rows.size());
  CHECK(back.n == 6);
  CHECK(back.m == 2);
  for (std::size_t k = 0; k < rec.rows.size(); ++k) {
    const SimRow& a = rec.rows[k];
    const SimRow& b = back.rows[k];
    CHECK(a.t == b.t);
    CHECK(a.x == b.x);
    CHECK(a.u == b.u);
    CHECK(a.mode == b.mode);
    CHECK(a.d_true == b.d_true);
    CHECK(a.d_hat == b.d_hat);
    CHECK(a.e_bar == b.e_bar);
    CHECK(a.h == b.h);
    CHECK(a.hb_T == b.hb_T);
    CHECK(a.min_h_margin == b.min_h_margin);
    CHECK(a.qp_status == b.qp_status);
  }
  CHECK(to_csv(back) == text);

  const fs::path empty = scratch("empty.csv");
  fs::remove(empty);
  CHECK_THROWS_AS(write_csv(SimRecord{}, empty.string()), IoError);
  CHECK_FALSE(fs::exists(empty));
  CHECK_THROWS_AS(write_csv(rec, "/nonexistent/dir/out.csv"), IoError);
}

TEST_CASE("identical configs give identical CSV") {
  for (const char* name : {"double-integrator", "quadrotor"}) {
    const SimConfig c = short_run(name, "ue-bcbf");
    CHECK(to_csv(run_simulation(c)) == to_csv(run_simulation(c)));
  }
}

TEST_CASE("svg output") {
  const SimRecord rec = run_simulation(short_run("double-integrator", "ue-bcbf"));
  const fs::path p = scratch("run.svg");
  render_svg(rec, p.string());
  const std::string svg = slurp(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("phase x0-x1") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK_THROWS_AS(render_svg(SimRecord{}, scratch("none.svg").string()), IoError);
}

TEST_CASE("rng streams") {
  CHECK(split_seed(1, 0) != split_seed(1, 1));
  CHECK(split_seed(1, 5) == split_seed(1, 5));
  std::mt19937_64 a = trial_rng(9, 3), b = trial_rng(9, 3);
  CHECK(a() == b());
  std::mt19937_64 r = trial_rng(4, 0);
  const FourierDisturbance d(3, 0.2, 0.05, r);
  for (int i = 0; i < 2000; ++i) {
    CHECK(d(0.01 * i).norm() <= 0.2 * (1.0 + 1e-12));
    CHECK(d.rate(0.01 * i).norm() <= 0.05 * (1.0 + 1e-12));
  }
  std::mt19937_64 r0 = trial_rng(4, 1);
  const FourierDisturbance frozen(2, 0.2, 0.0, r0);
  CHECK((frozen(0.0) - frozen(5.0)).norm() == 0.0);
}

TEST_CASE("verification suites on short settings") {
  SimConfig c;
  const BoundsReport b = verify_bounds(c, 5, 3, 4);
  CHECK(b.violations() == 0);
  CHECK(b.lognorm_tighter);
  CHECK(b.kinds[1].max_ratio >= b.kinds[0].max_ratio);
  const SubsetReport s = verify_subset(c, 50, 3);
  CHECK(s.violations == 0);
  CHECK(s.inside_estimated > 0);
  const SensitivityReport t = verify_sensitivity(c, 3, 3);
  CHECK(t.max_rel_phi <= 1e-4);
  // same seed, same report
  CHECK(verify_subset(c, 50, 3).inside_estimated == s.inside_estimated);
}

TEST_CASE("cli exit codes") {
  const std::string out = scratch("cli.csv").string();
  CHECK(run_cli("simulate --scenario double-integrator --controller ue-bcbf --out " + out) == 0);
  CHECK(fs::exists(out));
  CHECK(run_cli("simulate --scenario double-integrator") == 2);
  CHECK(run_cli("simulate --scenario nowhere --out " + out) == 2);
  CHECK(run_cli("verify wrong --scenario quadrotor") == 2);
  CHECK(run_cli("verify sensitivity --scenario quadrotor --trials 3 --seed 2") == 0);
  CHECK(run_cli("") == 2);
}
