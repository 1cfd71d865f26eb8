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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "z3ro/array_core.hpp"

namespace z3ro {

// Numerical verification of the real-valued precoder problem
//
//   max (sum g_m)^2   s.t.   sum g_m^2 = M,   sum g_m^3 = 0,
//
// which the LOS Z3RO design solves in closed form after the change of
// variables g_m = w_m e^{-j phi_m}.

struct LagrangeMultipliers {
  double lambda = 0.0;  // power constraint
  double mu = 0.0;      // cubic constraint
};

struct RealProblemSolution {
  std::vector<double> g;
  double objective = 0.0;       // (sum g)^2
  double power_residual = 0.0;  // sum g^2 - M
  double cubic_residual = 0.0;  // sum g^3
  std::optional<LagrangeMultipliers> multipliers;

  // |power_residual| <= 1e-8 M and |cubic_residual| <= 1e-8 M^(3/2).
  bool feasible() const;
};

RealProblemSolution evaluate_real_solution(std::vector<double> g);

// Two-level critical point: M_s entries delta, M - M_s entries alpha, with
// alpha = sqrt(M / ((M - M_s) + M_s^(1/3) (M - M_s)^(2/3))) and
// delta = -alpha ((M - M_s) / M_s)^(1/3). Requires 0 < M_s < M/2.
RealProblemSolution closed_form_candidate(std::size_t num_antennas, std::size_t num_saturated);

struct CriticalPointCheck {
  bool is_critical = false;
  double lambda = 0.0;
  double mu = 0.0;
  double gradient_residual = 0.0;  // max_m |2 sum g - 2 lambda g_m - 3 mu g_m^2|
};

// Fits (lambda, mu) to the stationarity conditions by least squares.
// is_critical iff the residual is <= 1e-6 |sum g|. Throws std::invalid_argument
// if g is infeasible.
CriticalPointCheck verify_critical_point(std::span<const double> g);

struct OracleReport {
  RealProblemSolution best;  // over random starts plus the closed-form start
  std::size_t best_start = 0;
  double best_random_objective = 0.0;  // over random starts only
  std::size_t starts = 0;
  std::size_t converged_starts = 0;
  // Feasible critical points whose entries take more than two distinct values.
  std::vector<RealProblemSolution> off_family;
};

inline constexpr std::size_t kDefaultOracleStarts = 128;
inline constexpr std::size_t kMinOracleStarts = 32;

// Multi-start projected-gradient ascent on the constraint manifold, with a
// Gauss-Newton retraction after every step. Starts run in parallel, each on
// its own substream; ties keep the lowest start index. The closed-form
// candidate (or [1, -1] for M = 2) is appended as a last start.
OracleReport solve_real_problem(std::size_t num_antennas, std::size_t starts,
                                const SeededRng& rng, unsigned workers = 0);

// Evidence for the conjecture that optimal complex g are real up to a phasor.
struct RealnessReport {
  double best_objective = 0.0;          // |sum g|^2
  double max_imag_after_phasor = 0.0;   // max_m |Im(g_m e^{-j psi})|
  ComplexVector best_g;                 // phasor removed
  std::size_t converged_starts = 0;
};

// Objective and residual imaginary part of g after removing its global phase.
RealnessReport realness_of(std::span<const cdouble> g);

// Solves the complex problem max |sum g|^2 s.t. sum |g|^2 = M,
// sum g |g|^2 = 0 by multi-start ascent. M must lie in [2, 12].
RealnessReport probe_realness_conjecture(std::size_t num_antennas, std::size_t starts,
                                         const SeededRng& rng, unsigned workers = 0);

}  // namespace z3ro
