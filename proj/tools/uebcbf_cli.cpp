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
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "uebcbf/config.hpp"
#include "uebcbf/errors.hpp"
#include "uebcbf/record_io.hpp"
#include "uebcbf/simulation.hpp"
#include "uebcbf/verification.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kAssertFailed = 1;
constexpr int kUsage = 2;

uebcbf::SimConfig base_config(const std::string& path,
                              const std::string& scenario) {
  uebcbf::SimConfig c;
  if (!path.empty()) c = uebcbf::load_config_file(path, c);
  if (!scenario.empty()) c.scenario = scenario;
  return c;
}

int run_verify(const std::string& suite, const uebcbf::SimConfig& cfg,
               int trials, std::uint64_t seed) {
  using namespace uebcbf;
  if (suite == "bounds") {
    const BoundsReport r = verify_bounds(cfg, trials, seed);
    for (const auto& k : r.kinds) {
      std::printf("%-9s rate=%.6g checks=%ld violations=%ld skipped=%ld "
                  "max_ratio=%.6f\n",
                  to_string(k.kind).c_str(), k.rate, k.checks, k.violations,
                  k.skipped, k.max_ratio);
    }
    std::printf("lognorm_tighter=%s\n", r.lognorm_tighter ? "yes" : "no");
    return r.violations() == 0 && r.lognorm_tighter ? kOk : kAssertFailed;
  }
  if (suite == "subset") {
    const SubsetReport r = verify_subset(cfg, trials, seed);
    std::printf("samples=%ld inside=%ld violations=%ld skipped=%ld\n",
                r.samples, r.inside_estimated, r.violations, r.skipped);
    std::printf("untightened: inside=%ld violations=%ld (not asserted)\n",
                r.none_inside, r.none_violations);
    return r.violations == 0 ? kOk : kAssertFailed;
  }
  if (suite == "sensitivity") {
    const SensitivityReport r = verify_sensitivity(cfg, trials, seed);
    std::printf("trials=%d skipped=%ld max_rel_Phi=%.3e max_rel_Theta=%.3e\n",
                r.trials, r.skipped, r.max_rel_phi, r.max_rel_theta);
    return r.max_rel_phi <= 1e-4 && r.max_rel_theta <= 1e-4 ? kOk
                                                             : kAssertFailed;
  }
  // estimator
  const EstimatorReport r = verify_estimator(cfg);
  std::printf("run_ok=%s max_ratio=%.9f max_error=%.3e late_error(t>=%.2f)=%.3e\n",
              r.run_ok ? "yes" : "no", r.max_containment_ratio, r.max_error,
              r.late_time, r.max_late_error);
  bool ok = r.run_ok && r.max_containment_ratio <= 1.0 + 1e-6;
  if (cfg.omega == 0.0 && cfg.scenario == "double-integrator") {
    ok = ok && r.max_late_error <= 1e-3;
  }
  return ok ? kOk : kAssertFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backup control barrier function safety filter simulator"};
  app.require_subcommand(1);

  std::string scenario, controller = "ue-bcbf", config_path, out, svg;
  double omega = 0.2;
  bool omega_set = false;
  auto* sim = app.add_subcommand("simulate", "run one closed-loop simulation");
  sim->add_option("--scenario", scenario)->required();
  sim->add_option("--controller", controller);
  auto* omega_opt = sim->add_option("--omega", omega);
  sim->add_option("--config", config_path);
  sim->add_option("--out", out)->required();
  sim->add_option("--svg", svg);

  std::string suite;
  int trials = 200;
  std::uint64_t seed = 1;
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("suite", suite)
      ->required()
      ->check(CLI::IsMember({"bounds", "subset", "sensitivity", "estimator"}));
  ver->add_option("--scenario", scenario)->required();
  ver->add_option("--trials", trials)->check(CLI::PositiveNumber);
  ver->add_option("--seed", seed);
  auto* ver_omega = ver->add_option("--omega", omega);
  ver->add_option("--config", config_path);

  auto* cmp = app.add_subcommand("compare", "compare the safety filters");
  cmp->add_option("--scenario", scenario)->required();
  cmp->add_option("--config", config_path);
  auto* cmp_omega = cmp->add_option("--omega", omega);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  omega_set = omega_opt->count() + ver_omega->count() + cmp_omega->count() > 0;

  try {
    uebcbf::SimConfig cfg = base_config(config_path, scenario);
    if (omega_set) cfg.omega = omega;
    if (*sim) {
      cfg.controller = controller;
      const uebcbf::SimRecord rec = uebcbf::run_simulation(cfg);
      if (!rec.rows.empty()) uebcbf::write_csv(rec, out);
      if (!svg.empty() && !rec.rows.empty()) uebcbf::render_svg(rec, svg);
      if (!rec.ok()) {
        std::fprintf(stderr, "simulation aborted: %s\n", rec.message.c_str());
        return kAssertFailed;
      }
      return kOk;
    }
    if (*ver) return run_verify(suite, cfg, trials, seed);
    const uebcbf::Comparison c = uebcbf::compare_controllers(cfg);
    std::fputs(uebcbf::format_comparison(c).c_str(), stdout);
    return c.ok() ? kOk : kAssertFailed;
  } catch (const uebcbf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const uebcbf::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kAssertFailed;
  }
}
