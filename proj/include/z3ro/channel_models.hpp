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

#include "z3ro/array_core.hpp"

namespace z3ro {

// Narrowband channel gains h_m from each antenna to the user, with the path
// loss beta they were drawn for.
class ChannelRealization {
 public:
  ChannelRealization(ComplexVector gains, double path_loss);

  std::size_t size() const noexcept { return gains_.size(); }
  const cdouble& operator[](std::size_t m) const { return gains_[m]; }
  std::span<const cdouble> gains() const noexcept { return gains_; }
  double path_loss() const noexcept { return path_loss_; }

  // sum_m |h_m|^2
  double energy() const;

 private:
  ComplexVector gains_;
  double path_loss_;
};

// Pure line-of-sight channel over a ULA: h_m = sqrt(beta) exp(-j phi_m) with
// phi_m = m 2 pi (d / lambda) cos(theta). theta must lie in the open interval
// (0, pi); endfire callers pass an epsilon.
ChannelRealization los_ula_channel(const ArrayGeometry& geometry, double user_angle_rad,
                                   double path_loss);

// i.i.d. Rayleigh gains with E|h_m|^2 = beta.
ChannelRealization iid_rayleigh_channel(std::size_t num_antennas, double path_loss,
                                        SeededRng& rng);

}  // namespace z3ro
