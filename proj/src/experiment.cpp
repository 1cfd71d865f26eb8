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

#include "z3ro/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "z3ro/channel_models.hpp"
#include "z3ro/opt_oracle.hpp"

namespace z3ro {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// JSON helpers. Every accessor names the offending key in its error.

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    const auto& key = item.key();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

std::string key_path(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("key '" + key + "' must be finite");
  return d;
}

std::size_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0 &&
                                 !v.is_number_unsigned())) {
    throw ConfigError("key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("key '" + key + "' must be a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("key '" + key + "' must be a boolean");
  return v.get<bool>();
}

double positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be positive");
  return v;
}

template <typename T, typename Fn>
T optional_value(const json& obj, std::string_view key, T fallback, const std::string& where,
                 Fn&& convert) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  return convert(*it, key_path(where, key));
}

template <typename Fn>
auto required_value(const json& obj, std::string_view key, const std::string& where, Fn&& convert) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw ConfigError("missing required key '" + key_path(where, key) + "'");
  return convert(*it, key_path(where, key));
}

// [a, b, ...] or {"start": a, "stop": b, "step": s}.
std::vector<std::size_t> count_list(const json& v, const std::string& key) {
  std::vector<std::size_t> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_count(v[i], key + "[" + std::to_string(i) + "]"));
    }
  } else if (v.is_object()) {
    reject_unknown_keys(v, {"start", "stop", "step"}, key);
    const auto start = required_value(v, "start", key, as_count);
    const auto stop = required_value(v, "stop", key, as_count);
    const auto step = optional_value<std::size_t>(v, "step", 1, key, as_count);
    if (step == 0) throw ConfigError("key '" + key + ".step' must be positive");
    for (std::size_t m = start; m <= stop; m += step) out.push_back(m);
  } else {
    throw ConfigError("key '" + key + "' must be a list or a range object");
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is empty");
  return out;
}

// [a, b, ...] or {"start": a, "stop": b, "points": n}.
std::vector<double> real_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_double(v[i], key + "[" + std::to_string(i) + "]"));
    }
  } else if (v.is_object()) {
    reject_unknown_keys(v, {"start", "stop", "points"}, key);
    const double start = required_value(v, "start", key, as_double);
    const double stop = required_value(v, "stop", key, as_double);
    const std::size_t points = required_value(v, "points", key, as_count);
    out = linspace(start, stop, points);
  } else {
    throw ConfigError("key '" + key + "' must be a list or a range object");
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is empty");
  return out;
}

Z3roConfig parse_selection(const json& obj, std::size_t num_saturated, const std::string& where) {
  const auto it = obj.find("selection");
  if (it == obj.end()) return Z3roConfig::first(num_saturated);
  const std::string key = key_path(where, "selection");
  if (it->is_array()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < it->size(); ++i) {
      idx.push_back(as_count((*it)[i], key + "[" + std::to_string(i) + "]"));
    }
    if (idx.size() != num_saturated) {
      throw ConfigError("key '" + key + "' must list exactly num_saturated indices");
    }
    return Z3roConfig::explicit_set(std::move(idx));
  }
  const auto name = as_string(*it, key);
  if (name == "first") return Z3roConfig::first(num_saturated);
  if (name == "strongest") return Z3roConfig::strongest(num_saturated);
  if (name == "weakest") return Z3roConfig::weakest(num_saturated);
  throw ConfigError("key '" + key + "' must be first, strongest, weakest or an index list");
}

double user_angle(const json& obj, const std::string& where) {
  const double deg = required_value(obj, "user_angle_deg", where, as_double);
  if (!(deg > 0.0 && deg < 180.0)) {
    throw ConfigError("key '" + key_path(where, "user_angle_deg") + "' must lie in (0, 180)");
  }
  return deg;
}

PatternConfig parse_pattern(const json& j) {
  reject_unknown_keys(j, {"experiment", "output", "spacing_over_wavelength", "user_angle_deg",
                          "pa", "symbol_power", "grid_points", "split", "runs"},
                      "pattern config");
  PatternConfig c;
  c.spacing_over_wavelength =
      positive(optional_value(j, "spacing_over_wavelength", 0.5, "", as_double),
               "spacing_over_wavelength");
  c.user_angle_deg = user_angle(j, "");
  const auto pa_text = optional_value<std::string>(j, "pa", "ideal", "", as_string);
  try {
    c.pa = parse_pa_descriptor(pa_text);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'pa': ") + e.what());
  }
  if (std::holds_alternative<RappPa>(c.pa)) {
    throw ConfigError("key 'pa': pattern experiments support ideal and poly3 PAs only");
  }
  c.symbol_power = positive(optional_value(j, "symbol_power", 1.0, "", as_double), "symbol_power");
  c.grid_points = optional_value(j, "grid_points", kDefaultGridPoints, "", as_count);
  if (c.grid_points < kMinIntegrationPoints) {
    throw ConfigError("key 'grid_points' must be at least " + std::to_string(kMinIntegrationPoints));
  }
  const auto split = optional_value<std::string>(j, "split", "raw", "", as_string);
  if (split == "raw") {
    c.split = PatternSplit::Raw;
  } else if (split == "bussgang") {
    c.split = PatternSplit::Bussgang;
  } else {
    throw ConfigError("key 'split' must be raw or bussgang");
  }

  const auto runs_it = j.find("runs");
  if (runs_it == j.end() || !runs_it->is_array() || runs_it->empty()) {
    throw ConfigError("key 'runs' must be a non-empty list");
  }
  for (std::size_t i = 0; i < runs_it->size(); ++i) {
    const auto& r = (*runs_it)[i];
    const std::string where = "runs[" + std::to_string(i) + "]";
    reject_unknown_keys(r, {"num_antennas", "precoder", "num_saturated", "selection"}, where);
    PatternRun run;
    run.num_antennas = required_value(r, "num_antennas", where, as_count);
    if (run.num_antennas < 1) throw ConfigError("key '" + where + ".num_antennas' must be >= 1");
    const auto kind = required_value(r, "precoder", where, as_string);
    if (kind == "mrt") {
      run.precoder.kind = PrecoderSpec::Kind::Mrt;
    } else if (kind == "z3ro") {
      run.precoder.kind = PrecoderSpec::Kind::Z3ro;
      const auto ms = required_value(r, "num_saturated", where, as_count);
      run.precoder.z3ro = parse_selection(r, ms, where);
      try {
        run.precoder.z3ro.validate(run.num_antennas);
      } catch (const ConfigError& e) {
        throw ConfigError("key '" + where + ".num_saturated': " + e.what());
      }
    } else {
      throw ConfigError("key '" + where + ".precoder' must be mrt or z3ro");
    }
    c.runs.push_back(std::move(run));
  }
  return c;
}

ArrayGainConfig parse_array_gain(const json& j) {
  reject_unknown_keys(j, {"experiment", "output", "num_antennas", "num_saturated"},
                      "array-gain config");
  ArrayGainConfig c;
  c.num_antennas = required_value(j, "num_antennas", "", count_list);
  c.num_saturated = required_value(j, "num_saturated", "", count_list);
  for (auto m : c.num_antennas) {
    if (m < 2) throw ConfigError("key 'num_antennas' entries must be >= 2");
  }
  for (auto ms : c.num_saturated) {
    if (ms < 1) throw ConfigError("key 'num_saturated' entries must be >= 1");
  }
  return c;
}

BackoffSweepExperiment parse_backoff(const json& j) {
  reject_unknown_keys(j, {"experiment", "output", "num_antennas", "spacing_over_wavelength",
                          "user_angle_deg", "num_saturated", "selection", "pa", "smoothness",
                          "array_snr_db", "path_loss", "noise_power", "backoff_db", "samples",
                          "seed"},
                      "backoff-sweep config");
  BackoffSweepExperiment c;
  auto& s = c.sweep;
  s.num_antennas = optional_value<std::size_t>(j, "num_antennas", 64, "", as_count);
  if (s.num_antennas < 2) throw ConfigError("key 'num_antennas' must be >= 2");
  s.spacing_over_wavelength = positive(
      optional_value(j, "spacing_over_wavelength", 0.5, "", as_double), "spacing_over_wavelength");
  s.user_angle_rad = deg_to_rad(user_angle(j, ""));
  const auto ms = optional_value<std::size_t>(j, "num_saturated", 4, "", as_count);
  s.z3ro = parse_selection(j, ms, "");
  try {
    s.z3ro.validate(s.num_antennas);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'num_saturated': ") + e.what());
  }
  const auto pa = optional_value<std::string>(j, "pa", "rapp", "", as_string);
  if (pa == "rapp") {
    s.ideal_pa = false;
  } else if (pa == "ideal") {
    s.ideal_pa = true;
  } else {
    throw ConfigError("key 'pa' must be rapp or ideal for back-off sweeps");
  }
  s.smoothness = positive(optional_value(j, "smoothness", 2.0, "", as_double), "smoothness");
  s.array_snr_db = optional_value(j, "array_snr_db", 26.0, "", as_double);
  s.path_loss = positive(optional_value(j, "path_loss", 1.0, "", as_double), "path_loss");
  s.noise_power = positive(optional_value(j, "noise_power", 1.0, "", as_double), "noise_power");
  s.samples = optional_value<std::size_t>(j, "samples", 1'000'000, "", as_count);
  if (s.samples < kMinMonteCarloSamples) {
    throw ConfigError("key 'samples' must be at least " + std::to_string(kMinMonteCarloSamples));
  }
  s.seed = optional_value<std::uint64_t>(j, "seed", 1, "", as_count);
  c.backoffs_db = required_value(j, "backoff_db", "", real_list);
  return c;
}

OracleVerifyConfig parse_oracle(const json& j) {
  reject_unknown_keys(j, {"experiment", "output", "num_antennas", "starts", "seed",
                          "probe_realness", "test_hooks"},
                      "oracle-verify config");
  OracleVerifyConfig c;
  c.num_antennas = required_value(j, "num_antennas", "", count_list);
  for (auto m : c.num_antennas) {
    if (m < 2 || m > 12) throw ConfigError("key 'num_antennas' entries must lie in [2, 12]");
  }
  c.starts = optional_value(j, "starts", kDefaultOracleStarts, "", as_count);
  if (c.starts < kMinOracleStarts) {
    throw ConfigError("key 'starts' must be at least " + std::to_string(kMinOracleStarts));
  }
  c.seed = optional_value<std::uint64_t>(j, "seed", 1, "", as_count);
  c.probe_realness = optional_value(j, "probe_realness", true, "", as_bool);
  if (const auto it = j.find("test_hooks"); it != j.end()) {
    reject_unknown_keys(*it, {"closed_form_scale"}, "test_hooks");
    c.closed_form_scale =
        optional_value(*it, "closed_form_scale", 1.0, "test_hooks", as_double);
  }
  return c;
}

// ---------------------------------------------------------------------------

PrecoderWeights synthesize(const PatternRun& run, const ArrayGeometry& geometry, double angle_rad) {
  if (run.precoder.kind == PrecoderSpec::Kind::Mrt) {
    return mrt(los_ula_channel(geometry, angle_rad, 1.0));
  }
  return z3ro_los(geometry, angle_rad, 1.0, run.precoder.z3ro);
}

std::string run_label(const PatternRun& run) {
  std::string label = run.precoder.kind == PrecoderSpec::Kind::Mrt ? "mrt" : "z3ro";
  label += "_M" + std::to_string(run.num_antennas);
  if (run.precoder.kind == PrecoderSpec::Kind::Z3ro) {
    label += "_Ms" + std::to_string(run.precoder.z3ro.num_saturated);
  }
  return label;
}

std::string format_db(double linear) { return format_number(db_or_infinite(linear)); }

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Pattern: return "pattern";
    case ExperimentKind::ArrayGain: return "array-gain";
    case ExperimentKind::BackoffSweep: return "backoff-sweep";
    case ExperimentKind::OracleVerify: return "oracle-verify";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto kind : {ExperimentKind::Pattern, ExperimentKind::ArrayGain,
                    ExperimentKind::BackoffSweep, ExperimentKind::OracleVerify}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

PaModel parse_pa_descriptor(std::string_view descriptor) {
  const auto colon = descriptor.find(':');
  const auto name = descriptor.substr(0, colon);
  auto args = [&]() -> std::pair<double, double> {
    if (colon == std::string_view::npos) {
      throw ConfigError("PA descriptor '" + std::string(descriptor) + "' needs two parameters");
    }
    const std::string rest(descriptor.substr(colon + 1));
    std::istringstream in(rest);
    double a = 0.0;
    double b = 0.0;
    char comma = 0;
    if (!(in >> a >> comma >> b) || comma != ',' || !(in >> std::ws).eof()) {
      throw ConfigError("PA descriptor '" + std::string(descriptor) + "' is malformed");
    }
    return {a, b};
  };
  if (name == "ideal") {
    if (colon != std::string_view::npos) throw ConfigError("PA descriptor 'ideal' takes no parameters");
    return IdealPa{};
  }
  if (name == "poly3") {
    const auto [re, im] = args();
    return make_third_order({re, im});
  }
  if (name == "rapp") {
    const auto [psat_db, smoothness] = args();
    return make_rapp(linear_from_db(psat_db), smoothness);
  }
  throw ConfigError("unknown PA descriptor '" + std::string(descriptor) + "'");
}

ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         std::optional<ExperimentKind> expected) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig config;
  if (const auto it = j.find("experiment"); it != j.end()) {
    config.kind = parse_experiment_kind(as_string(*it, "experiment"));
    if (expected && *expected != config.kind) {
      throw ConfigError("key 'experiment' is '" + std::string(to_string(config.kind)) +
                        "' but the subcommand is '" + std::string(to_string(*expected)) + "'");
    }
  } else if (expected) {
    config.kind = *expected;
  } else {
    throw ConfigError("missing required key 'experiment'");
  }
  if (const auto it = j.find("output"); it != j.end()) config.output = as_string(*it, "output");

  switch (config.kind) {
    case ExperimentKind::Pattern: config.body = parse_pattern(j); break;
    case ExperimentKind::ArrayGain: config.body = parse_array_gain(j); break;
    case ExperimentKind::BackoffSweep: config.body = parse_backoff(j); break;
    case ExperimentKind::OracleVerify: config.body = parse_oracle(j); break;
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        std::optional<ExperimentKind> expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str(), expected);
}

void apply_overrides(ExperimentConfig& config, const RunOverrides& overrides) {
  std::visit(
      [&](auto& body) {
        using Body = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<Body, BackoffSweepExperiment>) {
          if (overrides.quick) body.sweep.samples = kMinMonteCarloSamples;
          if (overrides.samples) {
            if (*overrides.samples < kMinMonteCarloSamples) {
              throw ConfigError("--samples must be at least " +
                                std::to_string(kMinMonteCarloSamples));
            }
            body.sweep.samples = *overrides.samples;
          }
          if (overrides.seed) body.sweep.seed = *overrides.seed;
          if (overrides.workers) body.sweep.workers = *overrides.workers;
        } else if constexpr (std::is_same_v<Body, OracleVerifyConfig>) {
          if (overrides.quick) body.starts = kMinOracleStarts;
          if (overrides.seed) body.seed = *overrides.seed;
          if (overrides.workers) body.workers = *overrides.workers;
        }
      },
      config.body);
}

// ---------------------------------------------------------------------------

RunResult run_pattern(const PatternConfig& config, std::ostream& csv) {
  RunResult result;
  const double angle_rad = deg_to_rad(config.user_angle_deg);
  const AngularGrid uniform = AngularGrid::uniform(config.grid_points);

  // Output angles: the integration grid plus the exact user direction.
  std::vector<double> angles = uniform.angles();
  if (std::find(angles.begin(), angles.end(), angle_rad) == angles.end()) {
    angles.insert(std::upper_bound(angles.begin(), angles.end(), angle_rad), angle_rad);
  }
  const AngularGrid output(std::move(angles));

  csv << "run,num_antennas,precoder,num_saturated,angle_deg,P_total,P_linear,P_dist3,"
         "D_total_dB,D_linear_dB,D_dist3_dB\n";
  for (const auto& run : config.runs) {
    const ArrayGeometry geometry(run.num_antennas, config.spacing_over_wavelength);
    const bool is_z3ro = run.precoder.kind == PrecoderSpec::Kind::Z3ro;
    if (is_z3ro && z3ro_zero_gain(run.num_antennas, run.precoder.z3ro.num_saturated)) {
      result.warnings.push_back(run_label(run) +
                                ": M_s = M/2 gives zero array gain toward the user");
    }
    const auto w = synthesize(run, geometry, angle_rad);
    const auto reference = directivity(
        radiation_pattern(geometry, w, config.pa, config.symbol_power, uniform, config.split),
        uniform);
    const auto pattern = directivity_from(
        radiation_pattern(geometry, w, config.pa, config.symbol_power, output, config.split),
        reference);

    const std::string label = run_label(run);
    const std::string precoder = is_z3ro ? "z3ro" : "mrt";
    const std::size_t ms = is_z3ro ? run.precoder.z3ro.num_saturated : 0;
    for (std::size_t k = 0; k < output.size(); ++k) {
      csv << label << ',' << run.num_antennas << ',' << precoder << ',' << ms << ','
          << format_number(rad_to_deg(output.angles()[k])) << ','
          << format_number(pattern.total[k]) << ',' << format_number(pattern.linear[k]) << ','
          << format_number(pattern.distortion3[k]) << ','
          << format_db(pattern.directivity_total[k]) << ','
          << format_db(pattern.directivity_linear[k]) << ','
          << format_db(pattern.directivity_distortion3[k]) << '\n';
    }
  }
  return result;
}

RunResult run_array_gain(const ArrayGainConfig& config, std::ostream& csv) {
  RunResult result;
  const LinkBudget unit(1.0, 1.0, 1.0);
  csv << "M,M_s,mrt_gain_db,z3ro_gain_db,penalty_db\n";
  for (auto ms : config.num_saturated) {
    for (auto m : config.num_antennas) {
      if (2 * ms > m) {
        result.warnings.push_back("skipping M = " + std::to_string(m) + ", M_s = " +
                                  std::to_string(ms) + ": M_s exceeds M/2");
        continue;
      }
      const double M = static_cast<double>(m);
      const double mrt_gain = M;
      const double z3ro_gain = z3ro_snr(m, ms, unit) / M;
      const double mrt_db = db_from_linear(mrt_gain);
      const double z3ro_db = db_or_infinite(z3ro_gain);
      csv << m << ',' << ms << ',' << format_number(mrt_db) << ',' << format_number(z3ro_db)
          << ',' << format_number(mrt_db - z3ro_db) << '\n';
    }
  }
  return result;
}

RunResult run_backoff_sweep(const BackoffSweepExperiment& config, std::ostream& csv) {
  RunResult result;
  if (z3ro_zero_gain(config.sweep.num_antennas, config.sweep.z3ro.num_saturated)) {
    result.warnings.push_back("M_s = M/2 gives zero array gain toward the user");
  }
  const auto rows = backoff_sweep(config.sweep, config.backoffs_db);
  csv << "backoff_db,precoder,snr_db,sdr_db,sndr_db,g_re,g_im,dist_power,n,stderr_db\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    csv << format_number(row.backoff_db) << ',' << row.precoder << ','
        << format_number(r.snr_db) << ',' << format_number(r.sdr_db) << ','
        << format_number(r.sndr_db) << ',' << format_number(r.bussgang_gain.real()) << ','
        << format_number(r.bussgang_gain.imag()) << ',' << format_number(r.distortion_power)
        << ',' << r.sample_count << ',' << format_number(r.standard_error_db) << '\n';
    if (r.distortion_clamped) {
      result.warnings.push_back("negative distortion estimate clamped at back-off " +
                                format_number(row.backoff_db) + " dB (" + row.precoder + ")");
    }
  }
  return result;
}

RunResult run_oracle_verify(const OracleVerifyConfig& config, std::ostream& csv) {
  RunResult result;
  const SeededRng root(config.seed);
  csv << "M,M_s,closed_form_objective,oracle_objective,random_start_objective,gap,"
         "stationarity_residual,critical,realness_objective,realness_max_imag,"
         "off_family_points,pass\n";
  bool all_pass = true;
  for (auto m : config.num_antennas) {
    const SeededRng stream = root.substream(m);
    // Closed form for M_s = 1; for M = 2 only the zero-gain pair [1, -1] exists.
    const std::vector<double> closed_g =
        m >= 3 ? closed_form_candidate(m, 1).g : std::vector<double>{1.0, -1.0};
    const double closed = evaluate_real_solution(closed_g).objective * config.closed_form_scale;
    const auto check = verify_critical_point(closed_g);
    const auto oracle = solve_real_problem(m, config.starts, stream.substream(0), config.workers);

    const double denom = std::max(std::abs(closed), 1.0);
    const double gap = std::max(std::abs(oracle.best.objective - closed),
                                std::abs(oracle.best_random_objective - closed)) /
                       denom;
    const bool pass = gap <= kOracleGapTolerance && check.is_critical;
    all_pass = all_pass && pass;

    std::string realness_obj;
    std::string realness_imag;
    if (config.probe_realness) {
      const auto probe =
          probe_realness_conjecture(m, config.starts, stream.substream(1), config.workers);
      realness_obj = format_number(probe.best_objective);
      realness_imag = format_number(probe.max_imag_after_phasor);
      if (probe.best_objective > evaluate_real_solution(closed_g).objective * (1.0 + 1e-6) + 1e-9) {
        result.warnings.push_back("M = " + std::to_string(m) +
                                  ": complex solution beats the real closed form");
      }
    }
    if (!oracle.off_family.empty()) {
      result.warnings.push_back("M = " + std::to_string(m) + ": " +
                                std::to_string(oracle.off_family.size()) +
                                " critical point(s) outside the two-level family");
    }
    csv << m << ",1," << format_number(closed) << ',' << format_number(oracle.best.objective)
        << ',' << format_number(oracle.best_random_objective) << ',' << format_number(gap) << ','
        << format_number(check.gradient_residual) << ',' << (check.is_critical ? 1 : 0) << ','
        << realness_obj << ',' << realness_imag << ',' << oracle.off_family.size() << ','
        << (pass ? 1 : 0) << '\n';

    // Non-global critical points M_s = 2 .. ceil(M/2) - 1.
    for (std::size_t ms = 2; 2 * ms < m; ++ms) {
      const auto candidate = closed_form_candidate(m, ms);
      const auto c = verify_critical_point(candidate.g);
      all_pass = all_pass && c.is_critical;
      csv << m << ',' << ms << ',' << format_number(candidate.objective) << ",,,,"
          << format_number(c.gradient_residual) << ',' << (c.is_critical ? 1 : 0) << ",,,,"
          << (c.is_critical ? 1 : 0) << '\n';
    }
  }
  result.exit_code = all_pass ? 0 : 1;
  return result;
}

RunResult run_experiment(const ExperimentConfig& config, std::ostream& csv) {
  return std::visit(
      [&](const auto& body) -> RunResult {
        using Body = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<Body, PatternConfig>) return run_pattern(body, csv);
        if constexpr (std::is_same_v<Body, ArrayGainConfig>) return run_array_gain(body, csv);
        if constexpr (std::is_same_v<Body, BackoffSweepExperiment>) {
          return run_backoff_sweep(body, csv);
        }
        if constexpr (std::is_same_v<Body, OracleVerifyConfig>) return run_oracle_verify(body, csv);
      },
      config.body);
}

// ---------------------------------------------------------------------------

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer) {
  namespace fs = std::filesystem;
  const fs::path target = fs::absolute(path);
  fs::path tmp = target;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
      writer(out);
      out.flush();
      if (!out) throw NumericError("failed while writing '" + path.string() + "'");
    }
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const InfeasibleError*>(&error) != nullptr) return 3;
  if (dynamic_cast<const NumericError*>(&error) != nullptr) return 4;
  if (dynamic_cast<const std::invalid_argument*>(&error) != nullptr) return 2;
  if (dynamic_cast<const std::domain_error*>(&error) != nullptr) return 2;
  if (dynamic_cast<const DegenerateError*>(&error) != nullptr) return 4;
  return 4;
}

}  // namespace z3ro
