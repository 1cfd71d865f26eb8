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

#include <cmath>
#include <stdexcept>

#include "z3ro/channel_models.hpp"
#include "z3ro/errors.hpp"

using namespace z3ro;

TEST_SUITE("channel_models") {
TEST_CASE("LOS examples") {
  const auto h = los_ula_channel(ArrayGeometry(2, 0.5), kPi / 2, 1.0);
  CHECK(std::abs(h[0] - cdouble(1, 0)) < 1e-15);
  CHECK(std::abs(h[1] - cdouble(1, 0)) < 1e-15);

  const auto endfire = los_ula_channel(ArrayGeometry(4, 0.5), 1e-9, 1.0);
  const cdouble expected[] = {1, -1, 1, -1};
  for (std::size_t m = 0; m < 4; ++m) CHECK(std::abs(endfire[m] - expected[m]) < 1e-12);

  CHECK_THROWS_AS(los_ula_channel(ArrayGeometry(4, 0.5), 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(los_ula_channel(ArrayGeometry(4, 0.5), kPi, 1.0), std::domain_error);
  CHECK_THROWS(los_ula_channel(ArrayGeometry(4, 0.5), 1.0, 0.0));
}

TEST_CASE("LOS magnitude and phase linearity") {
  const double beta = 3e-4;
  const auto h = los_ula_channel(ArrayGeometry(64, 0.37), 1.1, beta);
  CHECK(h.path_loss() == beta);
  const cdouble step = h[1] / h[0];
  for (std::size_t m = 0; m < h.size(); ++m) {
    CHECK(std::abs(std::abs(h[m]) - std::sqrt(beta)) < 1e-15);
    if (m > 0) CHECK(std::abs(h[m] / h[m - 1] - step) < 1e-12);
  }
  CHECK(h.energy() == doctest::Approx(64 * beta));
}

TEST_CASE("Rayleigh moments and determinism") {
  SeededRng rng(3);
  double sum = 0.0;
  const int draws = 100'000 / 16;
  for (int i = 0; i < draws; ++i) sum += iid_rayleigh_channel(16, 0.5, rng).energy();
  CHECK(sum / (16.0 * draws) == doctest::Approx(0.5).epsilon(0.01));

  SeededRng a(9), b(9);
  const auto ha = iid_rayleigh_channel(8, 1.0, a);
  const auto hb = iid_rayleigh_channel(8, 1.0, b);
  for (std::size_t m = 0; m < 8; ++m) CHECK(ha[m] == hb[m]);

  SeededRng big(11);
  CHECK(iid_rayleigh_channel(4096, 1.0, big).energy() / 4096.0 ==
        doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS(iid_rayleigh_channel(0, 1.0, big));
}
}
