// SPDX-License-Identifier: Apache-2.0
//
// z3ro-toolkit: precoder synthesis and verification for arrays with nonlinear PAs
// Copyright (C) 2026 The z3ro-toolkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "z3ro/errors.hpp"
#include "z3ro/opt_oracle.hpp"
#include "z3ro/precoders.hpp"

using namespace z3ro;

namespace {

// Two-level point solving both constraints by hand: M - Ms entries a, Ms
// entries d = -a ((M - Ms) / Ms)^(1/3), with (M - Ms) a^2 + Ms d^2 = M.
std::pair<double, double> two_level(double M, double Ms) {
  const double ratio = std::cbrt((M - Ms) / Ms);
  const double a = std::sqrt(M / ((M - Ms) + Ms * ratio * ratio));
  return {a, -a * ratio};
}

// Random point with sum g^3 = 0 and sum g^2 = M.
std::vector<double> random_feasible(std::size_t M, SeededRng& rng) {
  std::vector<double> g(M);
  for (std::size_t m = 0; m < M; ++m) g[m] = rng.normal();
  g[0] = std::abs(g[0]) + 0.1;
  g[1] = -std::abs(g[1]) - 0.1;
  double pos = 0.0, neg = 0.0;
  for (double x : g) (x > 0 ? pos : neg) += x * x * x;
  const double t = std::cbrt(-pos / neg);
  for (double& x : g) if (x < 0) x *= t;
  double energy = 0.0;
  for (double x : g) energy += x * x;
  for (double& x : g) x *= std::sqrt(M / energy);
  return g;
}

}  // namespace

TEST_SUITE("opt_oracle") {
TEST_CASE("closed-form candidate for M = 4") {
  const auto c = closed_form_candidate(4, 1);
  const auto [a, d] = two_level(4, 1);
  CHECK(a == doctest::Approx(0.887349188548962).epsilon(1e-12));
  CHECK(d == doctest::Approx(-1.279778985897368).epsilon(1e-12));
  REQUIRE(c.g.size() == 4);
  CHECK(c.g[0] == doctest::Approx(d).epsilon(1e-13));
  CHECK(c.g[3] == doctest::Approx(a).epsilon(1e-13));
  CHECK(c.objective == doctest::Approx(1.9106664265627495).epsilon(1e-12));
  CHECK(c.feasible());
  REQUIRE(c.multipliers.has_value());
  CHECK_THROWS_AS(closed_form_candidate(4, 2), ConfigError);
  CHECK_THROWS_AS(closed_form_candidate(4, 0), ConfigError);
}

TEST_CASE("candidate objective equals the closed-form SNR expression") {
  SeededRng rng(8);
  const LinkBudget unit(1, 1, 1);
  for (int i = 0; i < 50; ++i) {
    const std::size_t M = 3 + rng.next_u64() % 300;
    const std::size_t Ms = 1 + rng.next_u64() % ((M - 1) / 2);
    const auto c = closed_form_candidate(M, Ms);
    CHECK(c.objective == doctest::Approx(z3ro_snr(M, Ms, unit)).epsilon(1e-10));
    CHECK(c.feasible());
  }
  CHECK(closed_form_candidate(64, 1).objective / 64.0 == doctest::Approx(44.19).epsilon(1e-4));
}

TEST_CASE("candidate objective decreases with the saturated count") {
  for (std::size_t M : {5u, 8u, 13u, 40u}) {
    double previous = INFINITY;
    for (std::size_t Ms = 1; 2 * Ms < M; ++Ms) {
      const double obj = closed_form_candidate(M, Ms).objective;
      CHECK(obj < previous);
      previous = obj;
    }
  }
}

TEST_CASE("stationarity check") {
  CHECK(verify_critical_point(closed_form_candidate(8, 1).g).is_critical);
  const auto c3 = verify_critical_point(closed_form_candidate(8, 3).g);
  CHECK(c3.is_critical);
  CHECK(c3.gradient_residual <= 1e-6);
  const auto c = closed_form_candidate(8, 1);
  const auto check = verify_critical_point(c.g);
  CHECK(check.lambda == doctest::Approx(c.multipliers->lambda).epsilon(1e-8));
  CHECK(check.mu == doctest::Approx(c.multipliers->mu).epsilon(1e-8));

  SeededRng rng(13);
  for (int i = 0; i < 20; ++i) {
    const auto g = random_feasible(7, rng);
    const auto r = verify_critical_point(g);
    CHECK_FALSE(r.is_critical);
    CHECK(r.gradient_residual > 1e-3);
  }
  CHECK_THROWS_AS(verify_critical_point(std::vector<double>{1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("multi-start oracle recovers the closed form") {
  const auto two = solve_real_problem(2, kMinOracleStarts, SeededRng(1));
  CHECK(std::abs(two.best.objective) < 1e-12);
  CHECK(two.best.feasible());

  for (std::size_t M : {3u, 4u, 5u}) {
    const auto report = solve_real_problem(M, kDefaultOracleStarts, SeededRng(2));
    const double closed = closed_form_candidate(M, 1).objective;
    CHECK(report.best.feasible());
    CHECK(report.best.objective >= closed - 1e-9);
    CHECK(std::abs(report.best_random_objective - closed) <= 1e-6 * closed);
    CHECK(report.starts == kDefaultOracleStarts);
    CHECK(report.converged_starts > kDefaultOracleStarts / 2);
    CHECK(report.off_family.empty());

    auto permuted = report.best.g;
    std::reverse(permuted.begin(), permuted.end());
    const auto again = evaluate_real_solution(permuted);
    CHECK(again.objective == doctest::Approx(report.best.objective).epsilon(1e-13));
    CHECK(std::abs(again.cubic_residual - report.best.cubic_residual) < 1e-12);
  }
  CHECK_THROWS_AS(solve_real_problem(4, 8, SeededRng(1)), ConfigError);
  CHECK_THROWS_AS(solve_real_problem(1, 64, SeededRng(1)), ConfigError);
}

TEST_CASE("oracle is deterministic across worker counts") {
  const auto a = solve_real_problem(6, 40, SeededRng(4), 1);
  const auto b = solve_real_problem(6, 40, SeededRng(4), 3);
  CHECK(a.best.g == b.best.g);
  CHECK(a.best_start == b.best_start);
  CHECK(a.best_random_objective == b.best_random_objective);
}

TEST_CASE("realness probe") {
  const auto four = probe_realness_conjecture(4, kMinOracleStarts, SeededRng(3));
  CHECK(four.best_objective <= closed_form_candidate(4, 1).objective + 1e-6);
  CHECK(four.best_objective >= closed_form_candidate(4, 1).objective - 1e-6);
  CHECK(four.max_imag_after_phasor < 1e-6);

  const auto two = probe_realness_conjecture(2, kMinOracleStarts, SeededRng(3));
  CHECK(two.best_objective < 1e-10);

  ComplexVector g;
  for (double x : closed_form_candidate(6, 2).g) g.emplace_back(x, 0.0);
  const auto base = realness_of(g);
  for (auto& x : g) x *= std::polar(1.0, 2.1);
  const auto rotated = realness_of(g);
  CHECK(rotated.best_objective == doctest::Approx(base.best_objective).epsilon(1e-12));
  CHECK(rotated.max_imag_after_phasor < 1e-12);
  CHECK_THROWS_AS(probe_realness_conjecture(13, kMinOracleStarts, SeededRng(1)), ConfigError);
}
}
