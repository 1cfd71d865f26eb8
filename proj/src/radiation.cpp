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

#include "z3ro/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "z3ro/precoders.hpp"

namespace z3ro {

AngularGrid::AngularGrid(std::vector<double> angles_rad) : angles_(std::move(angles_rad)) {
  if (angles_.empty()) throw ConfigError("AngularGrid: empty angle grid");
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    const double a = angles_[i];
    if (!(a > -kPi && a <= kPi)) throw ConfigError("AngularGrid: angles must lie in (-pi, pi]");
    if (i > 0 && !(a > angles_[i - 1])) {
      throw ConfigError("AngularGrid: angles must be strictly increasing");
    }
  }
  if (angles_.size() >= 2) {
    const double first = angles_[1] - angles_[0];
    uniform_ = true;
    for (std::size_t i = 1; i < angles_.size(); ++i) {
      if (std::abs((angles_[i] - angles_[i - 1]) - first) > 1e-9 * first) {
        uniform_ = false;
        break;
      }
    }
    if (uniform_) step_ = first;
  }
}

AngularGrid AngularGrid::uniform(std::size_t n) {
  if (n < 2) throw ConfigError("AngularGrid::uniform: need at least 2 points");
  std::vector<double> angles(n);
  const double step = 2.0 * kPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) angles[k] = -kPi + static_cast<double>(k + 1) * step;
  angles.back() = kPi;
  AngularGrid grid(std::move(angles));
  grid.uniform_ = true;
  grid.step_ = step;
  return grid;
}

PatternResult radiation_pattern(const ArrayGeometry& geometry, const PrecoderWeights& w,
                                const PaModel& pa, double symbol_power, const AngularGrid& grid,
                                PatternSplit split) {
  if (w.size() != geometry.num_antennas()) {
    throw DimensionError("radiation_pattern: weights do not match the array size");
  }
  if (std::holds_alternative<RappPa>(pa)) {
    throw UnsupportedModelError(
        "radiation_pattern: closed-form moments need an ideal or third-order PA; use the "
        "Monte Carlo link metrics for Rapp");
  }
  if (!(symbol_power > 0.0)) throw ConfigError("radiation_pattern: symbol power must be positive");

  const cdouble a3 = std::holds_alternative<ThirdOrderPa>(pa) ? std::get<ThirdOrderPa>(pa).a3
                                                              : cdouble{};
  const std::size_t M = w.size();
  ComplexVector cubic(M);
  double linear_scale = 0.0;
  double cubic_scale = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    cubic[m] = w[m] * std::norm(w[m]);
    linear_scale += std::abs(w[m]);
    cubic_scale += std::abs(cubic[m]);
  }
  cubic_scale *= std::abs(a3);

  const double p = symbol_power;
  const std::size_t n = grid.size();
  PatternResult out;
  out.total.resize(n);
  out.linear.resize(n);
  out.distortion3.resize(n);

  for (std::size_t k = 0; k < n; ++k) {
    const auto steering = geometry.steering_vector(grid.angles()[k]);
    cdouble A{};
    cdouble B{};
    for (std::size_t m = 0; m < M; ++m) {
      A += w[m] * steering[m];
      B += cubic[m] * steering[m];
    }
    B *= a3;
    // Cancellation residue at the level of rounding error is an exact null.
    if (std::abs(A) <= kNullTolerance * linear_scale) A = 0.0;
    if (std::abs(B) <= kNullTolerance * cubic_scale) B = 0.0;

    const double cross = 4.0 * p * p * std::real(A * std::conj(B));
    const double total = p * std::norm(A) + cross + 6.0 * p * p * p * std::norm(B);
    out.total[k] = std::max(total, 0.0);
    if (split == PatternSplit::Raw) {
      out.linear[k] = p * std::norm(A);
      out.distortion3[k] = 6.0 * p * p * p * std::norm(B);
    } else {
      out.linear[k] = p * std::norm(A + 2.0 * p * B);
      out.distortion3[k] = 2.0 * p * p * p * std::norm(B);
    }
  }
  return out;
}

namespace {

void require_integrable(const AngularGrid& grid, std::size_t values) {
  if (!grid.is_uniform()) throw ResolutionError("directivity: grid must be uniform");
  if (grid.size() < kMinIntegrationPoints) {
    throw ResolutionError("directivity: grid needs at least " +
                          std::to_string(kMinIntegrationPoints) + " points");
  }
  if (values != grid.size()) throw DimensionError("directivity: pattern does not match the grid");
}

// Periodic trapezoid over a full turn.
double integrate(const std::vector<double>& values, double step) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * step;
}

std::vector<double> normalize(const std::vector<double>& values, double integral) {
  std::vector<double> out(values.size(), 0.0);
  if (integral > 0.0) {
    const double isotropic = integral / (2.0 * kPi);
    for (std::size_t k = 0; k < values.size(); ++k) out[k] = values[k] / isotropic;
  }
  return out;
}

}  // namespace

PatternResult directivity(PatternResult pattern, const AngularGrid& grid) {
  require_integrable(grid, pattern.total.size());
  pattern.total_power = integrate(pattern.total, grid.step());
  pattern.linear_power = integrate(pattern.linear, grid.step());
  pattern.distortion3_power = integrate(pattern.distortion3, grid.step());
  pattern.directivity_total = normalize(pattern.total, pattern.total_power);
  pattern.directivity_linear = normalize(pattern.linear, pattern.linear_power);
  pattern.directivity_distortion3 = normalize(pattern.distortion3, pattern.distortion3_power);
  return pattern;
}

PatternResult directivity_from(PatternResult pattern, const PatternResult& reference) {
  pattern.total_power = reference.total_power;
  pattern.linear_power = reference.linear_power;
  pattern.distortion3_power = reference.distortion3_power;
  pattern.directivity_total = normalize(pattern.total, pattern.total_power);
  pattern.directivity_linear = normalize(pattern.linear, pattern.linear_power);
  pattern.directivity_distortion3 = normalize(pattern.distortion3, pattern.distortion3_power);
  return pattern;
}

double total_distortion_power(const PatternResult& pattern, const AngularGrid& grid) {
  require_integrable(grid, pattern.distortion3.size());
  return integrate(pattern.distortion3, grid.step());
}

}  // namespace z3ro
