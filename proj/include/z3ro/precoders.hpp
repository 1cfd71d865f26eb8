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
#include <vector>

#include "z3ro/array_core.hpp"
#include "z3ro/channel_models.hpp"
#include "z3ro/pa_models.hpp"

namespace z3ro {

// Relative tolerance under which a combined third-order term is treated as an
// exact null. The scale is sum |h_m| |w_m|^3 (or |a3| sum |w_m|^3 for patterns).
inline constexpr double kNullTolerance = 1e-10;

enum class SaturatedSelection { FirstIndices, StrongestGains, WeakestGains, Explicit };

// Which antennas are driven into saturation with an opposite phase.
struct Z3roConfig {
  std::size_t num_saturated = 1;
  SaturatedSelection selection = SaturatedSelection::FirstIndices;
  std::vector<std::size_t> explicit_indices;

  static Z3roConfig first(std::size_t num_saturated);
  static Z3roConfig strongest(std::size_t num_saturated);
  static Z3roConfig weakest(std::size_t num_saturated);
  static Z3roConfig explicit_set(std::vector<std::size_t> indices);

  // Throws ConfigError unless 0 < M_s <= M/2 and explicit lists are valid.
  void validate(std::size_t num_antennas) const;
};

// True for M_s = M/2: the construction is valid but the array gain is zero.
bool z3ro_zero_gain(std::size_t num_antennas, std::size_t num_saturated);

// Sorted indices of the saturated antennas. Gain-based selections break ties
// by lowest index.
std::vector<std::size_t> saturated_indices(const Z3roConfig& cfg, const ChannelRealization& h);

// ---------------------------------------------------------------------------
// Synthesis

// w_m = alpha h_m^*, alpha = sqrt(M / sum |h|^2).
PrecoderWeights mrt(const ChannelRealization& h);

// Closed-form LOS design: alpha e^{j phi_m} on regular antennas and
// -alpha ((M - M_s) / M_s)^(1/3) e^{j phi_m} on the saturated ones.
PrecoderWeights z3ro_los(const ArrayGeometry& geometry, double user_angle_rad, double path_loss,
                         const Z3roConfig& cfg);

// General-channel extension: alpha h_m^* on regular antennas and
// -gamma alpha h_m^* on saturated ones with
// gamma = (sum_reg |h|^4 / sum_sat |h|^4)^(1/3).
PrecoderWeights z3ro_general(const ChannelRealization& h, const Z3roConfig& cfg);

// Saturated-antenna amplitude gain gamma of the general design.
double z3ro_gamma(const ChannelRealization& h, const Z3roConfig& cfg);

// ---------------------------------------------------------------------------
// Received signal and closed-form SNRs

// sum_m h_m w_m
cdouble array_response(const ChannelRealization& h, const PrecoderWeights& w);

// sum_m h_m w_m |w_m|^2: the coefficient of the third-order term at the user.
cdouble zero_distortion_residual(const ChannelRealization& h, const PrecoderWeights& w);

// sum_m |h_m| |w_m|^3, the natural magnitude scale of the residual.
double residual_scale(const ChannelRealization& h, const PrecoderWeights& w);

bool distortion_nulled(const ChannelRealization& h, const PrecoderWeights& w);

// p M sum |h|^2 / sigma_v^2. The path loss is already part of h.
double snr_mrt(const ChannelRealization& h, const LinkBudget& budget);

// (beta p / sigma_v^2) M ((M - M_s)^(2/3) - M_s^(2/3))^2 / ((M - M_s)^(1/3) + M_s^(1/3))
double z3ro_snr(std::size_t num_antennas, std::size_t num_saturated, const LinkBudget& budget);

// |sum h w|^2 p / sigma_v^2 for an arbitrary linear precoder.
double linear_snr(const ChannelRealization& h, const PrecoderWeights& w, const LinkBudget& budget);

struct ReceivedSample {
  cdouble value;
  cdouble linear;
  cdouble distortion;
  cdouble noise;
};

// r = sum_m h_m PA(w_m s) + v. `linear` is sum_m h_m w_m s; `distortion` is
// everything the PA adds on top (for the third-order PA, the a3 term).
ReceivedSample received_signal(const ChannelRealization& h, const PrecoderWeights& w, cdouble s,
                               const PaModel& pa, cdouble noise);

}  // namespace z3ro
