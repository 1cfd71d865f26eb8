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

#include "z3ro/link_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace z3ro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BatchSums {
  cdouble r_s_conj{};
  double s_power = 0.0;
  double r_power = 0.0;
  std::size_t count = 0;

  BatchSums& operator+=(const BatchSums& o) {
    r_s_conj += o.r_s_conj;
    s_power += o.s_power;
    r_power += o.r_power;
    count += o.count;
    return *this;
  }

  cdouble gain() const { return r_s_conj / s_power; }

  // mean |r - G s|^2 with G the least-squares gain of this batch.
  double distortion() const {
    return (r_power - std::norm(r_s_conj) / s_power) / static_cast<double>(count);
  }
};

// Every supported PA maps x to x g(|x|^2), so with x_m = w_m s the noiseless
// received signal is r = s sum_m h_m w_m g(|w_m|^2 |s|^2).
template <typename GainFn>
BatchSums run_batch(std::span<const cdouble> hw, std::span<const double> w_power,
                    std::size_t count, SeededRng rng, double symbol_power, GainFn gain) {
  BatchSums sums;
  sums.count = count;
  for (std::size_t i = 0; i < count; ++i) {
    const cdouble s = rng.complex_gaussian(symbol_power);
    const double s_power = std::norm(s);
    cdouble acc{};
    for (std::size_t m = 0; m < hw.size(); ++m) acc += hw[m] * gain(w_power[m] * s_power);
    const cdouble r = s * acc;
    sums.r_s_conj += r * std::conj(s);
    sums.s_power += s_power;
    sums.r_power += std::norm(r);
  }
  return sums;
}

double sdr_db_of(const BatchSums& b, double symbol_power) {
  const double dist = b.distortion();
  const double signal = std::norm(b.gain()) * symbol_power;
  if (!(dist > 0.0)) return kInf;
  return db_or_infinite(signal / dist);
}

}  // namespace

MetricsReport assemble_report(cdouble bussgang_gain, double symbol_power, double distortion_power,
                              double noise_power, std::size_t samples, double standard_error_db) {
  MetricsReport r;
  r.bussgang_gain = bussgang_gain;
  r.signal_power = std::norm(bussgang_gain) * symbol_power;
  r.distortion_clamped = distortion_power < 0.0;
  r.distortion_power = std::max(distortion_power, 0.0);
  r.noise_power = noise_power;
  r.sample_count = samples;
  r.standard_error_db = standard_error_db;

  r.snr = r.signal_power / noise_power;
  if (r.distortion_power > 0.0) {
    r.sdr = r.signal_power / r.distortion_power;
  } else {
    r.sdr = kInf;
  }
  r.sndr = (r.snr > 0.0 && r.sdr > 0.0) ? 1.0 / (1.0 / r.snr + 1.0 / r.sdr) : 0.0;
  r.snr_db = db_or_infinite(r.snr);
  r.sdr_db = db_or_infinite(r.sdr);
  r.sndr_db = db_or_infinite(r.sndr);
  return r;
}

MetricsReport bussgang_monte_carlo(const ChannelRealization& h, const PrecoderWeights& w,
                                   const PaModel& pa, const LinkBudget& budget, std::size_t n,
                                   const SeededRng& rng, unsigned workers) {
  if (h.size() != w.size()) throw DimensionError("bussgang_monte_carlo: length mismatch");
  if (n < kMinMonteCarloSamples) {
    throw PrecisionError("bussgang_monte_carlo: need at least " +
                         std::to_string(kMinMonteCarloSamples) + " samples");
  }
  const double p = budget.symbol_power();
  if (std::holds_alternative<IdealPa>(pa)) {
    return assemble_report(array_response(h, w), p, 0.0, budget.noise_power(), n, 0.0);
  }

  ComplexVector hw(h.size());
  std::vector<double> w_power(h.size());
  for (std::size_t m = 0; m < h.size(); ++m) {
    hw[m] = h[m] * w[m];
    w_power[m] = std::norm(w[m]);
  }

  const std::size_t batches = kMonteCarloBatches;
  std::vector<BatchSums> partial(batches);
  parallel_for(batches, workers, [&](std::size_t b) {
    const std::size_t count = n / batches + (b < n % batches ? 1 : 0);
    const SeededRng stream = rng.substream(b);
    partial[b] = std::visit(
        [&](const auto& model) -> BatchSums {
          using Model = std::decay_t<decltype(model)>;
          if constexpr (std::is_same_v<Model, ThirdOrderPa>) {
            const cdouble a3 = model.a3;
            return run_batch(hw, w_power, count, stream, p,
                             [a3](double u) { return 1.0 + a3 * u; });
          } else if constexpr (std::is_same_v<Model, RappPa>) {
            return run_batch(hw, w_power, count, stream, p,
                             [&model](double u) { return rapp_gain(model, u); });
          } else {
            return run_batch(hw, w_power, count, stream, p, [](double) { return 1.0; });
          }
        },
        pa);
  });

  BatchSums total;
  for (const auto& b : partial) total += b;
  if (!std::isfinite(total.r_power) || !std::isfinite(total.r_s_conj.real()) ||
      !std::isfinite(total.r_s_conj.imag())) {
    throw NumericError("bussgang_monte_carlo: non-finite received signal");
  }

  // Batch-means standard error of the SDR in dB.
  double stderr_db = 0.0;
  {
    std::vector<double> sdr_batches;
    sdr_batches.reserve(batches);
    for (const auto& b : partial) sdr_batches.push_back(sdr_db_of(b, p));
    const bool finite = std::all_of(sdr_batches.begin(), sdr_batches.end(),
                                    [](double v) { return std::isfinite(v); });
    if (finite) {
      const double mean = std::accumulate(sdr_batches.begin(), sdr_batches.end(), 0.0) /
                          static_cast<double>(batches);
      double var = 0.0;
      for (double v : sdr_batches) var += (v - mean) * (v - mean);
      var /= static_cast<double>(batches - 1);
      stderr_db = std::sqrt(var / static_cast<double>(batches));
    }
  }

  return assemble_report(total.gain(), p, total.distortion(), budget.noise_power(), n, stderr_db);
}

MetricsReport third_order_analytic_metrics(const ChannelRealization& h, const PrecoderWeights& w,
                                           cdouble a3, const LinkBudget& budget) {
  const double p = budget.symbol_power();
  const cdouble A = array_response(h, w);
  cdouble B = a3 * zero_distortion_residual(h, w);
  if (std::abs(B) <= kNullTolerance * std::abs(a3) * residual_scale(h, w)) B = 0.0;
  const cdouble G = A + 2.0 * p * B;
  return assemble_report(G, p, 2.0 * p * p * p * std::norm(B), budget.noise_power(), 0, 0.0);
}

// ---------------------------------------------------------------------------

std::vector<double> linspace(double first, double last, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {first};
  std::vector<double> out(n);
  const double step = (last - first) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = first + step * static_cast<double>(i);
  out.back() = last;
  return out;
}

std::vector<SweepRow> backoff_sweep(const BackoffSweepConfig& config,
                                    std::span<const double> backoffs_db) {
  if (backoffs_db.empty()) throw ConfigError("backoff_sweep: empty back-off list");
  const ArrayGeometry geometry(config.num_antennas, config.spacing_over_wavelength);
  const auto h = los_ula_channel(geometry, config.user_angle_rad, config.path_loss);
  const double M = static_cast<double>(config.num_antennas);
  const double p =
      linear_from_db(config.array_snr_db) * config.noise_power / (M * M * config.path_loss);
  const LinkBudget budget(p, config.noise_power, config.path_loss);

  const PrecoderWeights w_mrt = mrt(h);
  const PrecoderWeights w_z3ro =
      z3ro_los(geometry, config.user_angle_rad, config.path_loss, config.z3ro);
  const SeededRng rng(config.seed);

  std::vector<SweepRow> rows;
  rows.reserve(2 * backoffs_db.size());
  for (double backoff_db : backoffs_db) {
    if (!std::isfinite(backoff_db)) throw ConfigError("backoff_sweep: non-finite back-off");
    const PaModel pa = config.ideal_pa
                           ? PaModel{IdealPa{}}
                           : make_rapp(p / linear_from_db(backoff_db), config.smoothness);
    rows.push_back({backoff_db, "mrt",
                    bussgang_monte_carlo(h, w_mrt, pa, budget, config.samples, rng,
                                         config.workers)});
    rows.push_back({backoff_db, "z3ro",
                    bussgang_monte_carlo(h, w_z3ro, pa, budget, config.samples, rng,
                                         config.workers)});
  }
  return rows;
}

double sndr_crossover_db(const std::vector<SweepRow>& rows) {
  std::vector<double> backoff;
  std::vector<double> diff;
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    if (rows[i].precoder != "mrt" || rows[i + 1].precoder != "z3ro") {
      throw ConfigError("sndr_crossover_db: rows must alternate mrt/z3ro");
    }
    backoff.push_back(rows[i].backoff_db);
    diff.push_back(rows[i + 1].report.sndr_db - rows[i].report.sndr_db);
  }
  for (std::size_t k = 0; k + 1 < diff.size(); ++k) {
    if (diff[k] < 0.0 && diff[k + 1] >= 0.0) {
      const double t = diff[k] / (diff[k] - diff[k + 1]);
      return backoff[k] + t * (backoff[k + 1] - backoff[k]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace z3ro
