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
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "uebcbf/errors.hpp"
#include "uebcbf/flow.hpp"
#include "uebcbf/systems.hpp"

using namespace uebcbf;

TEST_CASE("flow grid") {
  const FlowGrid g(2.0, 0.1);
  CHECK(g.intervals() == 20);
  CHECK(g.count() == 21);
  CHECK(g.tau(0) == 0.0);
  CHECK(g.tau(20) == 2.0);
  const auto t = g.taus();
  for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k] > t[k - 1]);
  CHECK(t.back() == 2.0);
  CHECK_THROWS(FlowGrid(1.0, 0.3));
  CHECK_THROWS(FlowGrid(-1.0, 0.1));
  CHECK_THROWS(FlowGrid(1.0, 0.0));
  CHECK_NOTHROW(FlowGrid(0.2, 0.02));
}

TEST_CASE("ODE count") {
  CHECK(bundle_ode_dimension(2) == 10);
  CHECK(bundle_ode_dimension(6) == 78);
}

TEST_CASE("double integrator bundle matches closed form") {
  const Scenario s = make_double_integrator(0.2);
  const FlowGrid g(2.0, 0.1);
  const Vec x{{-1.2, 0.7}};
  const FlowBundle b =
      integrate_flow_bundle(s.model, s.backup, x, Vec::Zero(2), g, 4);
  REQUIRE(b.nodes() == 21);
  // node 0 is exactly the initial condition
  CHECK(b.phi[0] == x);
  CHECK(b.Phi[0] == Mat::Identity(2, 2));
  CHECK(b.Theta[0] == Mat::Zero(2, 2));
  for (int k = 0; k < b.nodes(); ++k) {
    const double tau = g.tau(k);
    const Vec phi{{x[0] + x[1] * tau - tau * tau / 2.0, x[1] - tau}};
    const Mat Phi{{1.0, tau}, {0.0, 1.0}};
    const Mat Theta{{tau, tau * tau / 2.0}, {0.0, tau}};
    CHECK((b.phi[k] - phi).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((b.Phi[k] - Phi).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((b.Theta[k] - Theta).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("constant estimate shifts the flow but not the sensitivities") {
  const Scenario s = make_double_integrator(0.2);
  const FlowGrid g(2.0, 0.1);
  const Vec x{{-1.0, 0.2}};
  const Vec c{{0.05, -0.03}};
  const FlowBundle b0 = integrate_flow_bundle(s.model, s.backup, x, Vec::Zero(2), g, 4);
  const FlowBundle b1 = integrate_flow_bundle(s.model, s.backup, x, c, g, 4);
  CHECK(b1.d_hat == c);
  for (int k = 0; k < g.count(); ++k) {
    const double tau = g.tau(k);
    // particular solution of x'' = c1 driven chain: (c0 tau + c1 tau^2/2, c1 tau)
    const Vec shift{{c[0] * tau + c[1] * tau * tau / 2.0, c[1] * tau}};
    CHECK((b1.phi[k] - b0.phi[k] - shift).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((b1.Phi[k] - b0.Phi[k]).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((b1.Theta[k] - b0.Theta[k]).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("nominal flow equals bundle with zero estimate") {
  std::mt19937_64 rng(21);
  for (const char* name : {"double-integrator", "quadrotor"}) {
    const Scenario s = make_scenario(name, 0.2);
    const FlowGrid g(s.flow_horizon, s.flow_delta);
    for (int i = 0; i < 5; ++i) {
      const Vec x = testutil::sample(s.verification_box, rng);
      const FlowBundle b =
          integrate_flow_bundle(s.model, s.backup, x, Vec::Zero(s.model.n), g, 4);
      const NominalFlow nf = integrate_nominal_flow(s.model, s.backup, x, g, 4);
      for (int k = 0; k < g.count(); ++k) {
        CHECK((b.phi[k] - nf.phi[k]).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((b.Phi[k] - nf.Phi[k]).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("finite-difference sensitivities") {
  const Scenario di = make_double_integrator(0.2);
  const double T = 2.0;
  const FlowGrid g(T, 0.1);
  const SensitivityEstimate fd = finite_difference_flow_sensitivity(
      di.model, di.backup, Vec{{-0.5, 0.3}}, Vec{{0.01, 0.02}}, g, 4);
  const Mat Phi{{1.0, T}, {0.0, 1.0}};
  const Mat Theta{{T, T * T / 2.0}, {0.0, T}};
  CHECK((fd.Phi - Phi).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((fd.Theta - Theta).cwiseAbs().maxCoeff() <= 1e-6);

  std::mt19937_64 rng(22);
  const Scenario q = make_planar_quadrotor();
  const FlowGrid gq(q.flow_horizon, q.flow_delta);
  for (int i = 0; i < 20; ++i) {
    const Vec x = testutil::sample(q.verification_box, rng);
    const Vec dh = testutil::sample(
        Box{Vec::Constant(6, -0.5), Vec::Constant(6, 0.5)}, rng);
    const FlowBundle b = integrate_flow_bundle(q.model, q.backup, x, dh, gq, 4);
    const SensitivityEstimate e =
        finite_difference_flow_sensitivity(q.model, q.backup, x, dh, gq, 4);
    CHECK(testutil::rel_err(b.Phi.back(), e.Phi) <= 1e-4);
    CHECK(testutil::rel_err(b.Theta.back(), e.Theta) <= 1e-4);
  }
}

TEST_CASE("semigroup property") {
  const Scenario s = make_double_integrator(0.0);
  const Vec x{{-2.0, 1.0}};
  const Forcing none = [](double) { return Vec::Zero(2); };
  const auto whole = integrate_state_flow(s.model, s.backup, x, none,
                                          FlowGrid(1.5, 0.1), 4);
  const auto first = integrate_state_flow(s.model, s.backup, x, none,
                                          FlowGrid(0.6, 0.1), 4);
  const auto second = integrate_state_flow(s.model, s.backup, first.back(),
                                           none, FlowGrid(0.9, 0.1), 4);
  CHECK((whole.back() - second.back()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("RK4 is fourth order") {
  const Scenario q = make_planar_quadrotor();
  const Vec x{{0.0, 3.0, 0.8, 0.5, -1.0, 1.5}};
  const Vec dh{{0.0, 0.0, 0.0, 0.4, -0.3, 0.0}};
  const FlowGrid g(1.0, 0.25);
  const Vec p1 = integrate_flow_bundle(q.model, q.backup, x, dh, g, 1).phi.back();
  const Vec p2 = integrate_flow_bundle(q.model, q.backup, x, dh, g, 2).phi.back();
  const Vec p4 = integrate_flow_bundle(q.model, q.backup, x, dh, g, 4).phi.back();
  const double ratio = (p1 - p2).norm() / (p2 - p4).norm();
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("flow errors") {
  const Scenario s = make_double_integrator(0.2);
  const FlowGrid g(2.0, 0.1);
  CHECK_THROWS_AS(integrate_flow_bundle(s.model, s.backup, Vec{{4.5, 4.5}},
                                        Vec::Zero(2), g, 4),
                  FlowEscapeError);
  CHECK_THROWS_AS(integrate_flow_bundle(s.model, s.backup, Vec{{5.5, 0.0}},
                                        Vec::Zero(2), g, 4),
                  DomainError);
  CHECK_THROWS(integrate_flow_bundle(s.model, s.backup, Vec{{0.0, 0.0}},
                                     Vec::Zero(2), g, 0));
}
