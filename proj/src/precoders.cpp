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

#include "z3ro/precoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace z3ro {

Z3roConfig Z3roConfig::first(std::size_t num_saturated) {
  return {num_saturated, SaturatedSelection::FirstIndices, {}};
}

Z3roConfig Z3roConfig::strongest(std::size_t num_saturated) {
  return {num_saturated, SaturatedSelection::StrongestGains, {}};
}

Z3roConfig Z3roConfig::weakest(std::size_t num_saturated) {
  return {num_saturated, SaturatedSelection::WeakestGains, {}};
}

Z3roConfig Z3roConfig::explicit_set(std::vector<std::size_t> indices) {
  const std::size_t count = indices.size();
  return {count, SaturatedSelection::Explicit, std::move(indices)};
}

void Z3roConfig::validate(std::size_t num_antennas) const {
  if (num_saturated == 0) throw ConfigError("Z3RO: num_saturated must be > 0");
  if (2 * num_saturated > num_antennas) {
    throw ConfigError("Z3RO: num_saturated = " + std::to_string(num_saturated) +
                      " exceeds M/2 for M = " + std::to_string(num_antennas));
  }
  if (selection == SaturatedSelection::Explicit) {
    if (explicit_indices.size() != num_saturated) {
      throw ConfigError("Z3RO: explicit index list size does not match num_saturated");
    }
    auto sorted = explicit_indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("Z3RO: explicit index list contains duplicates");
    }
    if (sorted.back() >= num_antennas) {
      throw ConfigError("Z3RO: explicit index out of range");
    }
  }
}

bool z3ro_zero_gain(std::size_t num_antennas, std::size_t num_saturated) {
  return 2 * num_saturated == num_antennas;
}

std::vector<std::size_t> saturated_indices(const Z3roConfig& cfg, const ChannelRealization& h) {
  const std::size_t num_antennas = h.size();
  cfg.validate(num_antennas);
  std::vector<std::size_t> idx;
  switch (cfg.selection) {
    case SaturatedSelection::FirstIndices:
      idx.resize(cfg.num_saturated);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      break;
    case SaturatedSelection::StrongestGains:
    case SaturatedSelection::WeakestGains: {
      std::vector<std::size_t> order(num_antennas);
      std::iota(order.begin(), order.end(), std::size_t{0});
      const bool strongest = cfg.selection == SaturatedSelection::StrongestGains;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double na = std::norm(h[a]);
        const double nb = std::norm(h[b]);
        return strongest ? na > nb : na < nb;
      });
      idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.num_saturated));
      break;
    }
    case SaturatedSelection::Explicit:
      idx = cfg.explicit_indices;
      break;
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

std::vector<bool> saturated_mask(const Z3roConfig& cfg, const ChannelRealization& h) {
  std::vector<bool> mask(h.size(), false);
  for (auto m : saturated_indices(cfg, h)) mask[m] = true;
  return mask;
}

void check_lengths(const ChannelRealization& h, const PrecoderWeights& w, const char* what) {
  if (h.size() != w.size()) {
    throw DimensionError(std::string(what) + ": channel has " + std::to_string(h.size()) +
                         " antennas, weights have " + std::to_string(w.size()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

PrecoderWeights mrt(const ChannelRealization& h) {
  const double energy = h.energy();
  if (!(energy > 0.0)) throw DegenerateError("mrt: all channel gains are zero");
  const double alpha = std::sqrt(static_cast<double>(h.size()) / energy);
  ComplexVector w(h.size());
  for (std::size_t m = 0; m < h.size(); ++m) w[m] = alpha * std::conj(h[m]);
  return PrecoderWeights(std::move(w));
}

PrecoderWeights z3ro_los(const ArrayGeometry& geometry, double user_angle_rad, double path_loss,
                         const Z3roConfig& cfg) {
  const auto h = los_ula_channel(geometry, user_angle_rad, path_loss);
  const auto mask = saturated_mask(cfg, h);

  const double M = static_cast<double>(geometry.num_antennas());
  const double Ms = static_cast<double>(cfg.num_saturated);
  const double regular = M - Ms;
  const double alpha = std::sqrt(M) / std::sqrt(regular + std::cbrt(Ms) * std::pow(regular, 2.0 / 3.0));
  const double saturated_gain = -std::cbrt(regular / Ms);

  const auto steering = geometry.steering_vector(user_angle_rad);
  ComplexVector w(steering.size());
  for (std::size_t m = 0; m < w.size(); ++m) {
    w[m] = alpha * (mask[m] ? saturated_gain : 1.0) * std::conj(steering[m]);
  }
  return PrecoderWeights(std::move(w));
}

double z3ro_gamma(const ChannelRealization& h, const Z3roConfig& cfg) {
  const auto mask = saturated_mask(cfg, h);
  double regular4 = 0.0;
  double saturated4 = 0.0;
  for (std::size_t m = 0; m < h.size(); ++m) {
    const double n2 = std::norm(h[m]);
    (mask[m] ? saturated4 : regular4) += n2 * n2;
  }
  if (!(saturated4 > 0.0)) {
    throw DegenerateError("z3ro_general: saturated antennas all have zero channel gain");
  }
  return std::cbrt(regular4 / saturated4);
}

PrecoderWeights z3ro_general(const ChannelRealization& h, const Z3roConfig& cfg) {
  const auto mask = saturated_mask(cfg, h);
  const double gamma = z3ro_gamma(h, cfg);

  double regular2 = 0.0;
  double saturated2 = 0.0;
  for (std::size_t m = 0; m < h.size(); ++m) (mask[m] ? saturated2 : regular2) += std::norm(h[m]);
  const double denom = regular2 + gamma * gamma * saturated2;
  if (!(denom > 0.0)) throw DegenerateError("z3ro_general: precoder has zero power");
  const double alpha = std::sqrt(static_cast<double>(h.size())) / std::sqrt(denom);
  if (!std::isfinite(alpha)) throw NumericError("z3ro_general: non-finite normalization");

  ComplexVector w(h.size());
  for (std::size_t m = 0; m < h.size(); ++m) {
    w[m] = alpha * (mask[m] ? -gamma : 1.0) * std::conj(h[m]);
  }
  return PrecoderWeights(std::move(w));
}

// ---------------------------------------------------------------------------

cdouble array_response(const ChannelRealization& h, const PrecoderWeights& w) {
  check_lengths(h, w, "array_response");
  cdouble acc{};
  for (std::size_t m = 0; m < h.size(); ++m) acc += h[m] * w[m];
  return acc;
}

cdouble zero_distortion_residual(const ChannelRealization& h, const PrecoderWeights& w) {
  check_lengths(h, w, "zero_distortion_residual");
  cdouble acc{};
  for (std::size_t m = 0; m < h.size(); ++m) acc += h[m] * w[m] * std::norm(w[m]);
  return acc;
}

double residual_scale(const ChannelRealization& h, const PrecoderWeights& w) {
  check_lengths(h, w, "residual_scale");
  double acc = 0.0;
  for (std::size_t m = 0; m < h.size(); ++m) {
    const double a = std::abs(w[m]);
    acc += std::abs(h[m]) * a * a * a;
  }
  return acc;
}

bool distortion_nulled(const ChannelRealization& h, const PrecoderWeights& w) {
  return std::abs(zero_distortion_residual(h, w)) <= kNullTolerance * residual_scale(h, w);
}

double snr_mrt(const ChannelRealization& h, const LinkBudget& budget) {
  return budget.symbol_power() * static_cast<double>(h.size()) * h.energy() / budget.noise_power();
}

double z3ro_snr(std::size_t num_antennas, std::size_t num_saturated, const LinkBudget& budget) {
  Z3roConfig::first(num_saturated).validate(num_antennas);
  const double M = static_cast<double>(num_antennas);
  const double Ms = static_cast<double>(num_saturated);
  const double regular = M - Ms;
  const double num = std::pow(regular, 2.0 / 3.0) - std::pow(Ms, 2.0 / 3.0);
  const double den = std::cbrt(regular) + std::cbrt(Ms);
  return budget.path_loss() * budget.symbol_power() / budget.noise_power() * M * num * num / den;
}

double linear_snr(const ChannelRealization& h, const PrecoderWeights& w, const LinkBudget& budget) {
  return std::norm(array_response(h, w)) * budget.symbol_power() / budget.noise_power();
}

ReceivedSample received_signal(const ChannelRealization& h, const PrecoderWeights& w, cdouble s,
                               const PaModel& pa, cdouble noise) {
  check_lengths(h, w, "received_signal");
  cdouble linear{};
  cdouble distortion{};
  const bool third_order = std::holds_alternative<ThirdOrderPa>(pa);
  const bool ideal = std::holds_alternative<IdealPa>(pa);
  for (std::size_t m = 0; m < h.size(); ++m) {
    const cdouble x = w[m] * s;
    linear += h[m] * x;
    if (ideal) continue;
    if (third_order) {
      distortion += h[m] * third_order_split(pa, x).distortion;
    } else {
      distortion += h[m] * (amplify(pa, x) - x);
    }
  }
  return {linear + distortion + noise, linear, distortion, noise};
}

}  // namespace z3ro
