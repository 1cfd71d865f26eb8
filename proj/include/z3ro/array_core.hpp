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

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "z3ro/errors.hpp"

namespace z3ro {

using cdouble = std::complex<double>;
using ComplexVector = std::vector<cdouble>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Power conversions. Powers are linear everywhere inside the library.

// 10 log10(x); throws std::domain_error for x <= 0.
double db_from_linear(double x);
double linear_from_db(double db);

// Like db_from_linear but maps 0 to -inf and +inf to +inf. Used where exact
// nulls are meaningful (zero array gain, nulled distortion).
double db_or_infinite(double x);

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// ---------------------------------------------------------------------------

// Uniform linear array: M isotropic elements spaced d apart (d given in
// carrier wavelengths).
class ArrayGeometry {
 public:
  ArrayGeometry(std::size_t num_antennas, double spacing_over_wavelength);

  std::size_t num_antennas() const noexcept { return num_antennas_; }
  double spacing_over_wavelength() const noexcept { return spacing_; }

  // Per-element phase m * 2 pi (d / lambda) cos(angle). The angle is measured
  // from the array axis.
  std::vector<double> phase_profile(double angle_rad) const;

  // exp(-j phase_m): the far-field response of element m toward `angle_rad`.
  ComplexVector steering_vector(double angle_rad) const;

 private:
  std::size_t num_antennas_;
  double spacing_;
};

// p, sigma_v^2 and beta.
class LinkBudget {
 public:
  LinkBudget(double symbol_power, double noise_power, double path_loss);

  double symbol_power() const noexcept { return symbol_power_; }
  double noise_power() const noexcept { return noise_power_; }
  double path_loss() const noexcept { return path_loss_; }

 private:
  double symbol_power_;
  double noise_power_;
  double path_loss_;
};

// Precoding weights normalized to the PA-input power budget
// sum |w_m|^2 = M.
class PrecoderWeights {
 public:
  static constexpr double kNormTolerance = 1e-9;

  // Throws ConfigError when the weights violate the power normalization.
  explicit PrecoderWeights(ComplexVector weights);

  // Rescales arbitrary nonzero weights onto the budget.
  static PrecoderWeights normalized(ComplexVector weights);

  std::size_t size() const noexcept { return weights_.size(); }
  const cdouble& operator[](std::size_t m) const { return weights_[m]; }
  std::span<const cdouble> values() const noexcept { return weights_; }
  auto begin() const noexcept { return weights_.begin(); }
  auto end() const noexcept { return weights_.end(); }

  // Same weights times a unit phasor.
  PrecoderWeights rotated(double phase_rad) const;

 private:
  ComplexVector weights_;
};

// ---------------------------------------------------------------------------

// Deterministic random source. The engine is mt19937_64 seeded through
// std::seed_seq from (seed, stream_id); both algorithms are fully specified by
// the standard, so a given pair reproduces the same raw stream everywhere.
// Gaussian variates use our own Box-Muller transform because
// std::normal_distribution is implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Independent child stream; children of equal (seed, stream, child) agree.
  SeededRng substream(std::uint64_t child) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal.
  double normal();
  // Circularly symmetric complex Gaussian with E|z|^2 = power.
  cdouble complex_gaussian(double power);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// n i.i.d. CN(0, p) symbols.
ComplexVector gaussian_symbols(SeededRng& rng, double symbol_power, std::size_t n);

// ---------------------------------------------------------------------------

// Resolves a requested worker count; 0 means "all hardware threads".
unsigned resolve_workers(unsigned requested);

// Runs fn(i) for i in [0, count) on up to `workers` threads. Work items must
// write only to their own output slot; results are therefore independent of
// scheduling. The first exception thrown by any item is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace z3ro
