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

#include "z3ro/channel_models.hpp"

#include <cmath>
#include <stdexcept>

namespace z3ro {

ChannelRealization::ChannelRealization(ComplexVector gains, double path_loss)
    : gains_(std::move(gains)), path_loss_(path_loss) {
  if (gains_.empty()) throw ConfigError("ChannelRealization: no antennas");
  if (!(path_loss_ > 0.0) || !std::isfinite(path_loss_)) {
    throw ConfigError("ChannelRealization: path loss must be positive");
  }
  for (const auto& h : gains_) {
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) {
      throw NumericError("ChannelRealization: non-finite gain");
    }
  }
}

double ChannelRealization::energy() const {
  double acc = 0.0;
  for (const auto& h : gains_) acc += std::norm(h);
  return acc;
}

ChannelRealization los_ula_channel(const ArrayGeometry& geometry, double user_angle_rad,
                                   double path_loss) {
  if (!(user_angle_rad > 0.0 && user_angle_rad < kPi)) {
    throw std::domain_error("los_ula_channel: user angle must lie in (0, pi) rad");
  }
  if (!(path_loss > 0.0)) throw ConfigError("los_ula_channel: path loss must be positive");
  const double amplitude = std::sqrt(path_loss);
  auto gains = geometry.steering_vector(user_angle_rad);
  for (auto& h : gains) h *= amplitude;
  return ChannelRealization(std::move(gains), path_loss);
}

ChannelRealization iid_rayleigh_channel(std::size_t num_antennas, double path_loss,
                                        SeededRng& rng) {
  if (num_antennas < 1) throw ConfigError("iid_rayleigh_channel: M must be >= 1");
  if (!(path_loss > 0.0)) throw ConfigError("iid_rayleigh_channel: path loss must be positive");
  return ChannelRealization(gaussian_symbols(rng, path_loss, num_antennas), path_loss);
}

}  // namespace z3ro
