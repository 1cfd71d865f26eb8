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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "z3ro/link_metrics.hpp"
#include "z3ro/opt_oracle.hpp"
#include "z3ro/pa_models.hpp"
#include "z3ro/precoders.hpp"
#include "z3ro/radiation.hpp"

namespace z3ro {

enum class ExperimentKind { Pattern, ArrayGain, BackoffSweep, OracleVerify };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

// `ideal`, `poly3:a3_re,a3_im` or `rapp:psat_db,S`.
PaModel parse_pa_descriptor(std::string_view descriptor);

struct PrecoderSpec {
  enum class Kind { Mrt, Z3ro } kind = Kind::Mrt;
  Z3roConfig z3ro;  // used when kind == Z3ro
};

struct PatternRun {
  std::size_t num_antennas = 0;
  PrecoderSpec precoder;
};

struct PatternConfig {
  double spacing_over_wavelength = 0.5;
  double user_angle_deg = 80.0;
  PaModel pa = IdealPa{};
  double symbol_power = 1.0;
  std::size_t grid_points = kDefaultGridPoints;
  PatternSplit split = PatternSplit::Raw;
  std::vector<PatternRun> runs;
};

struct ArrayGainConfig {
  std::vector<std::size_t> num_antennas;
  std::vector<std::size_t> num_saturated;
};

struct BackoffSweepExperiment {
  BackoffSweepConfig sweep;
  std::vector<double> backoffs_db;
};

struct OracleVerifyConfig {
  std::vector<std::size_t> num_antennas;
  std::size_t starts = kDefaultOracleStarts;
  std::uint64_t seed = 1;
  bool probe_realness = true;
  unsigned workers = 0;
  // Test hook: the closed-form objective is multiplied by this factor before
  // the comparison, forcing a failing gap when != 1.
  double closed_form_scale = 1.0;
};

using ExperimentBody =
    std::variant<PatternConfig, ArrayGainConfig, BackoffSweepExperiment, OracleVerifyConfig>;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Pattern;
  std::optional<std::string> output;
  ExperimentBody body;
};

// Parses and validates a JSON config. Unknown keys and out-of-range values
// throw ConfigError naming the key. When `expected` is given, a config whose
// "experiment" key names a different kind is rejected.
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         std::optional<ExperimentKind> expected = std::nullopt);
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        std::optional<ExperimentKind> expected = std::nullopt);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<unsigned> workers;
  bool quick = false;  // 1e4 Monte Carlo samples, 32 oracle starts
};

void apply_overrides(ExperimentConfig& config, const RunOverrides& overrides);

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> warnings;
};

// Each runner writes one CSV (header + rows) to `csv`.
RunResult run_pattern(const PatternConfig& config, std::ostream& csv);
RunResult run_array_gain(const ArrayGainConfig& config, std::ostream& csv);
RunResult run_backoff_sweep(const BackoffSweepExperiment& config, std::ostream& csv);
// exit_code 0 iff every gap is <= kOracleGapTolerance and every closed-form
// candidate is a critical point; 1 otherwise.
RunResult run_oracle_verify(const OracleVerifyConfig& config, std::ostream& csv);
RunResult run_experiment(const ExperimentConfig& config, std::ostream& csv);

inline constexpr double kOracleGapTolerance = 1e-6;

// CSV number formatting; infinities as "inf" / "-inf".
std::string format_number(double value);

// Writes through a temporary file in the target directory and renames it
// into place on success; on failure nothing is left behind.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer);

// CLI exit-code classification: 2 configuration, 3 infeasibility, 4 numeric.
int exit_code_for(const std::exception& error);

}  // namespace z3ro
