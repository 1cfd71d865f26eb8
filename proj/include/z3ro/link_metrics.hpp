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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "z3ro/array_core.hpp"
#include "z3ro/channel_models.hpp"
#include "z3ro/pa_models.hpp"
#include "z3ro/precoders.hpp"

namespace z3ro {

// Bussgang view of the received signal r = G s + d + v.
struct MetricsReport {
  cdouble bussgang_gain;
  double signal_power = 0.0;      // |G|^2 p
  double distortion_power = 0.0;  // E|d|^2
  double noise_power = 0.0;       // sigma_v^2

  // Linear ratios; sdr is +inf when the distortion is exactly zero.
  double snr = 0.0;
  double sdr = 0.0;
  double sndr = 0.0;
  double snr_db = 0.0;
  double sdr_db = 0.0;
  double sndr_db = 0.0;

  std::size_t sample_count = 0;   // 0 for closed-form reports
  double standard_error_db = 0.0; // batch-means standard error of sdr_db
  bool distortion_clamped = false;
};

// Builds the ratios from the three powers. SNDR is formed as
// 1 / (1/SNR + 1/SDR). A negative distortion estimate is clamped to zero and
// flagged.
MetricsReport assemble_report(cdouble bussgang_gain, double symbol_power, double distortion_power,
                              double noise_power, std::size_t samples, double standard_error_db);

inline constexpr std::size_t kMinMonteCarloSamples = 10'000;
inline constexpr std::size_t kMonteCarloBatches = 32;

// Monte Carlo Bussgang estimate over n Gaussian symbols:
//   G^ = sum r s^* / sum |s|^2,  E|d|^2 = mean |r - G^ s|^2,
// with r the noiseless received signal; noise enters analytically. Samples are
// split into kMonteCarloBatches fixed batches, each on its own RNG substream,
// and reduced in batch order, so the result does not depend on `workers`.
// The ideal PA is distortion-free by definition and is evaluated in closed
// form.
MetricsReport bussgang_monte_carlo(const ChannelRealization& h, const PrecoderWeights& w,
                                   const PaModel& pa, const LinkBudget& budget, std::size_t n,
                                   const SeededRng& rng, unsigned workers = 0);

// Closed-form Bussgang metrics for the third-order PA with Gaussian symbols:
// r = A s + B s|s|^2 + v gives G = A + 2pB and E|d|^2 = 2p^3 |B|^2.
MetricsReport third_order_analytic_metrics(const ChannelRealization& h, const PrecoderWeights& w,
                                           cdouble a3, const LinkBudget& budget);

// ---------------------------------------------------------------------------

// LOS back-off experiment. The symbol power p is pinned by
// M^2 beta p / sigma_v^2 = array_snr_db and p_sat = p / backoff.
struct BackoffSweepConfig {
  std::size_t num_antennas = 64;
  double spacing_over_wavelength = 0.5;
  double user_angle_rad = deg_to_rad(80.0);
  Z3roConfig z3ro = Z3roConfig::first(4);
  bool ideal_pa = false;
  double smoothness = 2.0;
  double array_snr_db = 26.0;
  double path_loss = 1.0;
  double noise_power = 1.0;
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

struct SweepRow {
  double backoff_db = 0.0;
  std::string precoder;  // "mrt" or "z3ro"
  MetricsReport report;
};

// Rows ordered by back-off, MRT before Z3RO. Every point reuses the same
// symbol stream.
std::vector<SweepRow> backoff_sweep(const BackoffSweepConfig& config,
                                    std::span<const double> backoffs_db);

// n points from first to last inclusive.
std::vector<double> linspace(double first, double last, std::size_t n);

// Back-off where z3ro SNDR - mrt SNDR changes sign from negative to
// non-negative, linearly interpolated between sweep points; NaN if none.
double sndr_crossover_db(const std::vector<SweepRow>& rows);

}  // namespace z3ro
