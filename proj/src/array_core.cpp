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

#include "z3ro/array_core.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace z3ro {

double db_from_linear(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("db_from_linear: input must be positive, got " + std::to_string(x));
  }
  return 10.0 * std::log10(x);
}

double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

double db_or_infinite(double x) {
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x) && x > 0.0) return x;
  return db_from_linear(x);
}

// ---------------------------------------------------------------------------

ArrayGeometry::ArrayGeometry(std::size_t num_antennas, double spacing_over_wavelength)
    : num_antennas_(num_antennas), spacing_(spacing_over_wavelength) {
  if (num_antennas_ < 1) throw ConfigError("ArrayGeometry: num_antennas must be >= 1");
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
    throw ConfigError("ArrayGeometry: spacing_over_wavelength must be positive and finite");
  }
}

std::vector<double> ArrayGeometry::phase_profile(double angle_rad) const {
  const double step = 2.0 * kPi * spacing_ * std::cos(angle_rad);
  std::vector<double> phases(num_antennas_);
  for (std::size_t m = 0; m < num_antennas_; ++m) phases[m] = static_cast<double>(m) * step;
  return phases;
}

ComplexVector ArrayGeometry::steering_vector(double angle_rad) const {
  const auto phases = phase_profile(angle_rad);
  ComplexVector out(phases.size());
  for (std::size_t m = 0; m < phases.size(); ++m) out[m] = std::polar(1.0, -phases[m]);
  return out;
}

LinkBudget::LinkBudget(double symbol_power, double noise_power, double path_loss)
    : symbol_power_(symbol_power), noise_power_(noise_power), path_loss_(path_loss) {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("LinkBudget: ") + name + " must be positive and finite");
    }
  };
  check(symbol_power_, "symbol_power");
  check(noise_power_, "noise_power");
  check(path_loss_, "path_loss");
}

// ---------------------------------------------------------------------------

namespace {

double total_power(std::span<const cdouble> w) {
  double acc = 0.0;
  for (const auto& v : w) acc += std::norm(v);
  return acc;
}

}  // namespace

PrecoderWeights::PrecoderWeights(ComplexVector weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ConfigError("PrecoderWeights: empty weight vector");
  for (const auto& w : weights_) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
      throw NumericError("PrecoderWeights: non-finite weight");
    }
  }
  const double budget = static_cast<double>(weights_.size());
  const double power = total_power(weights_);
  if (std::abs(power - budget) > kNormTolerance * budget) {
    throw ConfigError("PrecoderWeights: sum |w_m|^2 = " + std::to_string(power) +
                      " violates the budget M = " + std::to_string(weights_.size()));
  }
}

PrecoderWeights PrecoderWeights::normalized(ComplexVector weights) {
  const double power = total_power(weights);
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw DegenerateError("PrecoderWeights::normalized: weights have zero or non-finite power");
  }
  const double scale = std::sqrt(static_cast<double>(weights.size()) / power);
  for (auto& w : weights) w *= scale;
  return PrecoderWeights(std::move(weights));
}

PrecoderWeights PrecoderWeights::rotated(double phase_rad) const {
  const cdouble phasor = std::polar(1.0, phase_rad);
  ComplexVector out(weights_);
  for (auto& w : out) w *= phasor;
  return PrecoderWeights(std::move(out));
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

SeededRng SeededRng::substream(std::uint64_t child) const {
  return SeededRng(seed_, splitmix64(stream_id_ ^ splitmix64(child)));
}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const cdouble z = complex_gaussian(2.0);
  spare_ = z.imag();
  has_spare_ = true;
  return z.real();
}

cdouble SeededRng::complex_gaussian(double power) {
  // Box-Muller: |z|^2 is exponential with mean `power`, phase uniform.
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-power * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

ComplexVector gaussian_symbols(SeededRng& rng, double symbol_power, std::size_t n) {
  if (n < 1) throw ConfigError("gaussian_symbols: n must be >= 1");
  if (!(symbol_power > 0.0) || !std::isfinite(symbol_power)) {
    throw ConfigError("gaussian_symbols: symbol power must be positive");
  }
  ComplexVector out(n);
  for (auto& s : out) s = rng.complex_gaussian(symbol_power);
  return out;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1U : hw;
}

}  // namespace z3ro
