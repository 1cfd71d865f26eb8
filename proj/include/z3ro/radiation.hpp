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
#include "z3ro/pa_models.hpp"

namespace z3ro {

// Observation angles in (-pi, pi], strictly increasing.
class AngularGrid {
 public:
  explicit AngularGrid(std::vector<double> angles_rad);

  // n equally spaced angles -pi + k 2pi/n, k = 1..n (last point is pi).
  static AngularGrid uniform(std::size_t n);

  std::size_t size() const noexcept { return angles_.size(); }
  const std::vector<double>& angles() const noexcept { return angles_; }
  bool is_uniform() const noexcept { return uniform_; }
  double step() const noexcept { return step_; }

 private:
  std::vector<double> angles_;
  bool uniform_ = false;
  double step_ = 0.0;
};

inline constexpr std::size_t kDefaultGridPoints = 4096;
inline constexpr std::size_t kMinIntegrationPoints = 1024;

// How the radiated power is split into "signal" and "third-order" parts.
//  Raw:      p|A|^2 and 6p^3|B|^2; the cross term 4p^2 Re(A B^*) only enters
//            the total.
//  Bussgang: p|A + 2pB|^2 and 2p^3|B|^2, i.e. the distortion is the part of
//            the radiated field uncorrelated with the symbol.
enum class PatternSplit { Raw, Bussgang };

struct PatternResult {
  std::vector<double> total;
  std::vector<double> linear;
  std::vector<double> distortion3;

  // Integrated powers and directivities; filled by directivity().
  double total_power = 0.0;
  double linear_power = 0.0;
  double distortion3_power = 0.0;
  std::vector<double> directivity_total;
  std::vector<double> directivity_linear;
  std::vector<double> directivity_distortion3;
};

// Expected radiated power E|sum_m y_m e^{-j phi~_m}|^2 per grid angle for
// Gaussian symbols of power p. With A = sum w e^{-j phi~} and
// B = a3 sum w |w|^2 e^{-j phi~}, the closed form is
// p|A|^2 + 4p^2 Re(A B^*) + 6p^3 |B|^2. Accepts Ideal and ThirdOrder PAs only.
PatternResult radiation_pattern(const ArrayGeometry& geometry, const PrecoderWeights& w,
                                const PaModel& pa, double symbol_power, const AngularGrid& grid,
                                PatternSplit split = PatternSplit::Raw);

// Integrates each component over the uniform grid (periodic trapezoid) and
// fills the directivity fields D = P / (P_T / 2pi).
PatternResult directivity(PatternResult pattern, const AngularGrid& grid);

// Applies the integrated powers of `reference` to a pattern evaluated on a
// different (possibly non-uniform) set of angles.
PatternResult directivity_from(PatternResult pattern, const PatternResult& reference);

// Integral of the third-order component over the uniform grid.
double total_distortion_power(const PatternResult& pattern, const AngularGrid& grid);

}  // namespace z3ro
